#include "rtlmut/hdl/emit.hpp"

#include <sstream>

namespace rtlmut::hdl {

namespace {

constexpr int kTernaryPrec = 0;
constexpr int kUnaryPrec = 12;
constexpr int kPrimaryPrec = 13;

int binary_precedence(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^" || op == "~^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=" || op == "===" || op == "!==") return 6;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
  if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  if (op == "**") return 11;
  return 1;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Ternary: return kTernaryPrec;
    case NodeKind::Binary: return binary_precedence(n.text);
    case NodeKind::Unary: return kUnaryPrec;
    default: return kPrimaryPrec;
  }
}

void expr(std::ostream& os, const Node& n, int min_prec);

void expr_child(std::ostream& os, const Node& n, int min_prec) {
  if (precedence(n) < min_prec) {
    os << '(';
    expr(os, n, 0);
    os << ')';
  } else {
    expr(os, n, min_prec);
  }
}

void expr(std::ostream& os, const Node& n, int /*min_prec*/) {
  switch (n.kind) {
    case NodeKind::Ident:
    case NodeKind::Number:
      os << n.text;
      break;
    case NodeKind::Unary:
      os << n.text;
      expr_child(os, n.children[0], kPrimaryPrec);
      break;
    case NodeKind::Binary: {
      const int p = binary_precedence(n.text);
      expr_child(os, n.children[0], p);
      os << ' ' << n.text << ' ';
      expr_child(os, n.children[1], p + 1);
      break;
    }
    case NodeKind::Ternary:
      expr_child(os, n.children[0], kTernaryPrec + 1);
      os << " ? ";
      expr_child(os, n.children[1], kTernaryPrec);
      os << " : ";
      expr_child(os, n.children[2], kTernaryPrec);
      break;
    case NodeKind::Concat:
      os << '{';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) os << ", ";
        expr(os, n.children[i], 0);
      }
      os << '}';
      break;
    case NodeKind::Replicate:
      os << '{';
      expr_child(os, n.children[0], kPrimaryPrec);
      expr(os, n.children[1], 0);
      os << '}';
      break;
    case NodeKind::BitSelect:
      expr_child(os, n.children[0], kPrimaryPrec);
      os << '[';
      expr(os, n.children[1], 0);
      os << ']';
      break;
    case NodeKind::PartSelect:
      expr_child(os, n.children[0], kPrimaryPrec);
      os << '[';
      expr(os, n.children[1], 0);
      os << n.text;
      expr(os, n.children[2], 0);
      os << ']';
      break;
    case NodeKind::SysCall:
      os << n.text;
      if (!n.children.empty()) {
        os << '(';
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) os << ", ";
          expr(os, n.children[i], 0);
        }
        os << ')';
      }
      break;
    case NodeKind::Empty:
      break;
    default:
      os << "/*" << kind_name(n.kind) << "*/";
      break;
  }
}

std::string expr_str(const Node& n) {
  std::ostringstream os;
  expr(os, n, 0);
  return os.str();
}

std::string range_str(const Node& range) {
  return "[" + expr_str(range.children[0]) + ":" + expr_str(range.children[1]) + "]";
}

std::string type_str(const Node& type) {
  std::string out = type.text;
  auto add = [&](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += ' ';
    out += part;
  };
  add(type.aux);
  if (!type.children.empty()) add(range_str(type.children[0]));
  return out;
}

std::string declarator_str(const Node& d) {
  std::string out = d.text;
  if (!d.children[0].empty()) out += " " + range_str(d.children[0]);
  if (!d.children[1].empty()) out += " = " + expr_str(d.children[1]);
  return out;
}

// "input wire [7:0] a, b" / "wire [3:0] x = y" / "parameter W = 8"
std::string decl_str(const Node& decl) {
  std::string out;
  auto add = [&](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += ' ';
    out += part;
  };
  add(decl.aux);
  add(type_str(decl.children[0]));
  std::string names;
  for (std::size_t i = 1; i < decl.children.size(); ++i) {
    if (i > 1) names += ", ";
    names += declarator_str(decl.children[i]);
  }
  add(names);
  return out;
}

std::string delay_str(const Node& delay) {
  const Node& v = delay.children[0];
  if (v.kind == NodeKind::Number || v.kind == NodeKind::Ident) return "#" + v.text;
  return "#(" + expr_str(v) + ")";
}

std::string connection_str(const Node& c) {
  if (c.text.empty()) return expr_str(c.children[0]);
  return "." + c.text + "(" + expr_str(c.children[0]) + ")";
}

std::string event_str(const Node& ctrl) {
  if (ctrl.text == "*") return "@(*)";
  std::string out = "@(";
  for (std::size_t i = 0; i < ctrl.children.size(); ++i) {
    if (i) out += " or ";
    const Node& ev = ctrl.children[i];
    if (!ev.aux.empty()) out += ev.aux + " ";
    out += expr_str(ev.children[0]);
  }
  return out + ")";
}

class Printer {
 public:
  std::string str() const { return os_.str(); }

  void line(int indent, const std::string& text) {
    for (int i = 0; i < indent; ++i) os_ << "  ";
    os_ << text << '\n';
  }

  void stmt(const Node& n, int indent, const std::string& lead) {
    switch (n.kind) {
      case NodeKind::Block:
        line(indent, lead + "begin" + (n.text.empty() ? "" : " : " + n.text));
        for (const auto& c : n.children) stmt(c, indent + 1, "");
        line(indent, "end");
        break;
      case NodeKind::If: {
        const std::string head = lead + "if (" + expr_str(n.children[0]) + ")";
        branch(n.children[1], indent, head);
        const Node& els = n.children[2];
        if (!els.empty()) {
          if (els.kind == NodeKind::Block || els.kind == NodeKind::If) {
            stmt(els, indent, "else ");
          } else {
            line(indent, "else");
            stmt(els, indent + 1, "");
          }
        }
        break;
      }
      case NodeKind::Case:
        line(indent, lead + n.aux + " (" + expr_str(n.children[0]) + ")");
        for (std::size_t i = 1; i < n.children.size(); ++i) case_item(n.children[i], indent + 1);
        line(indent, "endcase");
        break;
      case NodeKind::BlockingAssign:
        line(indent, lead + expr_str(n.children[0]) + " = " + expr_str(n.children[1]) + ";");
        break;
      case NodeKind::NonblockingAssign:
        line(indent, lead + expr_str(n.children[0]) + " <= " + expr_str(n.children[1]) + ";");
        break;
      case NodeKind::DelayStmt:
        stmt(n.children[1], indent, lead + delay_str(n.children[0]) + " ");
        break;
      case NodeKind::NullStmt:
        line(indent, lead + ";");
        break;
      default:
        line(indent, lead + "/*" + std::string(kind_name(n.kind)) + "*/");
        break;
    }
  }

  void branch(const Node& body, int indent, const std::string& head) {
    if (body.kind == NodeKind::Block) {
      stmt(body, indent, head + " ");
    } else {
      line(indent, head);
      stmt(body, indent + 1, "");
    }
  }

  void case_item(const Node& item, int indent) {
    std::string labels;
    if (item.text == "default") {
      labels = "default";
    } else {
      for (std::size_t i = 0; i + 1 < item.children.size(); ++i) {
        if (i) labels += ", ";
        labels += expr_str(item.children[i]);
      }
    }
    stmt(item.children.back(), indent, labels + ": ");
  }

  void instantiation(const Node& n, int indent) {
    std::string head = n.text;
    const Node& args = n.children[0];
    if (!args.children.empty()) {
      head += " #(";
      for (std::size_t i = 0; i < args.children.size(); ++i) {
        if (i) head += ", ";
        head += connection_str(args.children[i]);
      }
      head += ")";
    }
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const Node& item = n.children[i];
      const bool last = i + 1 == n.children.size();
      const std::string prefix = i == 1 ? head + " " : "";
      if (item.children.empty()) {
        line(indent, prefix + item.text + " ()" + (last ? ";" : ","));
        continue;
      }
      line(indent, prefix + item.text + " (");
      for (std::size_t c = 0; c < item.children.size(); ++c) {
        line(indent + 1, connection_str(item.children[c]) + (c + 1 < item.children.size() ? "," : ""));
      }
      line(indent, std::string(")") + (last ? ";" : ","));
    }
  }

  void item(const Node& n, int indent) {
    switch (n.kind) {
      case NodeKind::PortDecl:
      case NodeKind::NetDecl:
      case NodeKind::ParamDecl:
        line(indent, decl_str(n) + ";");
        break;
      case NodeKind::ContinuousAssign: {
        std::string text = "assign ";
        if (!n.children[0].empty()) text += delay_str(n.children[0]) + " ";
        text += expr_str(n.children[1]) + " = " + expr_str(n.children[2]) + ";";
        line(indent, text);
        break;
      }
      case NodeKind::Always: {
        const std::string head = "always " + event_str(n.children[0]);
        branch(n.children[1], indent, head);
        break;
      }
      case NodeKind::Instantiation:
        instantiation(n, indent);
        break;
      default:
        if (is_statement(n.kind)) {
          stmt(n, indent, "");
        } else {
          line(indent, "/*" + std::string(kind_name(n.kind)) + "*/");
        }
        break;
    }
  }

  void module(const Node& m) {
    std::string head = "module " + m.text;
    const Node& params = m.children[0];
    const Node& ports = m.children[1];
    if (!params.children.empty()) {
      line(0, head + " #(");
      for (std::size_t i = 0; i < params.children.size(); ++i) {
        line(1, decl_str(params.children[i]) + (i + 1 < params.children.size() ? "," : ""));
      }
      head = ")";
    }
    if (m.aux == "ansi") {
      if (ports.children.empty()) {
        line(0, head + " ();");
      } else {
        line(0, head + " (");
        for (std::size_t i = 0; i < ports.children.size(); ++i) {
          line(1, decl_str(ports.children[i]) + (i + 1 < ports.children.size() ? "," : ""));
        }
        line(0, ");");
      }
    } else if (!ports.children.empty()) {
      std::string list;
      for (std::size_t i = 0; i < ports.children.size(); ++i) {
        if (i) list += ", ";
        list += ports.children[i].text;
      }
      line(0, head + " (" + list + ");");
    } else {
      line(0, head + ";");
    }
    for (std::size_t i = 2; i < m.children.size(); ++i) item(m.children[i], 1);
    line(0, "endmodule");
  }

 private:
  std::ostringstream os_;
};

std::string strip_trailing_newline(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

}  // namespace

std::string emit_expression(const Node& e) { return expr_str(e); }

std::string emit(const Node& node) {
  if (node.kind == NodeKind::SourceText) {
    std::string out;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) out += '\n';
      Printer p;
      p.module(node.children[i]);
      out += p.str();
    }
    return out;
  }
  return emit_fragment(node) + "\n";
}

std::string emit_fragment(const Node& node) {
  if (is_expression(node.kind)) return expr_str(node);
  Printer p;
  switch (node.kind) {
    case NodeKind::Empty:
      return "";
    case NodeKind::Module:
      p.module(node);
      break;
    case NodeKind::SourceText:
      return strip_trailing_newline(emit(node));
    case NodeKind::Declarator:
      return declarator_str(node);
    case NodeKind::DataType:
      return type_str(node);
    case NodeKind::Range:
      return range_str(node);
    case NodeKind::Delay:
      return delay_str(node);
    case NodeKind::Connection:
      return connection_str(node);
    case NodeKind::EventControl:
      return event_str(node);
    case NodeKind::InstanceItem: {
      std::string out = node.text + " (";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        out += connection_str(node.children[i]);
      }
      return out + ")";
    }
    case NodeKind::ParamArgs: {
      std::string out = "#(";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        out += connection_str(node.children[i]);
      }
      return out + ")";
    }
    case NodeKind::CaseItem:
      p.case_item(node, 0);
      break;
    case NodeKind::PortRef:
      return node.text;
    case NodeKind::ParamPorts:
    case NodeKind::Ports: {
      std::string out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        out += node.children[i].kind == NodeKind::PortRef ? node.children[i].text : decl_str(node.children[i]);
      }
      return out;
    }
    default:
      p.item(node, 0);
      break;
  }
  return strip_trailing_newline(p.str());
}

}  // namespace rtlmut::hdl
