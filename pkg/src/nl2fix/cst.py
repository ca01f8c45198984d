"""Lexing and lightweight concrete-syntax parsing for Java-style code.

The parser is deliberately permissive: it targets single methods and common
statement/expression forms rather than the full language, which keeps it
robust on model-generated snippets that a real compiler would reject.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class ParseError(Exception):
    def __init__(self, message: str, position: int = -1):
        self.position = position
        super().__init__(message)


def load_keywords(path: str | Path) -> frozenset[str]:
    """Read a keyword list file: one keyword per line, UTF-8."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(w.strip() for w in lines if w.strip())


JAVA_KEYWORDS = load_keywords(Path(__file__).parent / "data" / "java_keywords.txt")

_PRIMITIVES = frozenset(
    {"int", "long", "short", "byte", "char", "boolean", "float", "double", "void"}
)
_MODIFIERS = frozenset(
    {
        "public", "private", "protected", "static", "final", "abstract",
        "synchronized", "native", "strictfp", "transient", "volatile", "default",
    }
)

_OPERATORS = sorted(
    [
        ">>>=", ">>>", ">>=", "<<=", "->", "::", "==", "!=", "<=", ">=", "&&",
        "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
        ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^",
        "?", ":",
    ],
    key=len,
    reverse=True,
)

_MASTER = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<linecomment>//[^\n]*)"
    r"|(?P<blockcomment>/\*.*?\*/)"
    r"|(?P<string>\"(?:\\.|[^\"\\\n])*\"?)"
    r"|(?P<char>'(?:\\.|[^'\\\n])*'?)"
    r"|(?P<number>0[xX][0-9a-fA-F_]+[lL]?"
    r"|(?:\d[\d_]*\.[\d_]*|\.\d[\d_]*|\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?)"
    r"|(?P<word>[A-Za-z_$][A-Za-z0-9_$]*)"
    r"|(?P<op>" + "|".join(re.escape(op) for op in _OPERATORS) + r")"
    r"|(?P<punct>[{}()\[\];,.@])",
    re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str


def _lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        match = _MASTER.match(source, pos)
        if match is None:
            tokens.append(Token("error", source[pos]))
            pos += 1
            continue
        pos = match.end()
        kind = match.lastgroup or "error"
        if kind in ("ws", "linecomment", "blockcomment"):
            continue
        tokens.append(Token(kind, match.group()))
    return tokens


def tokenize(source: str, language: str = "java") -> list[str]:
    """Lexical tokens with whitespace and comments dropped; unlexable bytes
    come through as single-character tokens."""
    return [t.text for t in _lex(source)]


@dataclass(frozen=True)
class Node:
    """Concrete-syntax node; `text` carries names for identifier-like leaves."""

    kind: str
    children: tuple["Node", ...] = ()
    text: str | None = None


def parse(source: str, language: str = "java") -> Node:
    """Full parse; raises ParseError if any input remains unparsed."""
    parser = _Parser(_lex(source))
    items = []
    while not parser.eof():
        items.append(parser.item())
    return Node("unit", tuple(items))


def parse_prefix(source: str, language: str = "java") -> Node:
    """Parse top-level items greedily; stop silently at the first error."""
    parser = _Parser(_lex(source))
    items = []
    while not parser.eof():
        mark = parser.pos
        try:
            items.append(parser.item())
        except ParseError:
            parser.pos = mark
            break
    return Node("unit", tuple(items))


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def eof(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self, offset: int = 0) -> Token | None:
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            raise ParseError(f"expected {text!r}", self.pos)
        self.pos += 1
        return tok

    def expect_name(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text in JAVA_KEYWORDS:
            raise ParseError("expected identifier", self.pos)
        self.pos += 1
        return tok.text

    def fail(self, message: str):
        raise ParseError(message, self.pos)

    # -- declarations -------------------------------------------------------

    def item(self) -> Node:
        mark = self.pos
        try:
            return self.method()
        except ParseError:
            self.pos = mark
        return self.statement()

    def modifiers(self) -> None:
        while True:
            tok = self.peek()
            if tok is None:
                return
            if tok.text in _MODIFIERS:
                self.pos += 1
                continue
            if tok.text == "@":
                self.pos += 1
                self.expect_word_any()
                if self.at("("):
                    self.skip_balanced("(", ")")
                continue
            return

    def expect_word_any(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            raise ParseError("expected word", self.pos)
        self.pos += 1
        return tok.text

    def skip_balanced(self, open_text: str, close_text: str) -> None:
        self.expect(open_text)
        depth = 1
        while depth:
            tok = self.peek()
            if tok is None:
                self.fail(f"unbalanced {open_text}")
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1
            self.pos += 1

    def method(self) -> Node:
        self.modifiers()
        if self.at("<"):
            self.consume_generics()
        self.type_ref()
        if not self.at("("):
            self.expect_name()
        params = self.param_list()
        if self.accept("throws"):
            self.type_ref()
            while self.accept(","):
                self.type_ref()
        if self.accept(";"):
            return Node("method_decl", (params,))
        body = self.block()
        return Node("method", (params, body))

    def param_list(self) -> Node:
        self.expect("(")
        params: list[Node] = []
        while not self.at(")"):
            self.modifiers()
            ptype = self.type_ref()
            while self.accept("."):  # varargs ellipsis
                pass
            name = self.expect_name()
            while self.at("["):
                self.expect("[")
                self.expect("]")
            params.append(Node("param", (ptype,), name))
            if not self.accept(","):
                break
        self.expect(")")
        return Node("params", tuple(params))

    def type_ref(self) -> Node:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            self.fail("expected type")
        if tok.text in JAVA_KEYWORDS and tok.text not in _PRIMITIVES:
            self.fail("keyword cannot start a type")
        self.pos += 1
        if tok.text not in _PRIMITIVES:
            while self.at(".") and self.peek(1) and self.peek(1).kind == "word":
                self.pos += 2
        if self.at("<"):
            self.consume_generics()
        while self.at("[") and self.peek(1) and self.peek(1).text == "]":
            self.pos += 2
        return Node("type")

    def consume_generics(self) -> None:
        self.expect("<")
        depth = 1
        while depth > 0:
            tok = self.peek()
            if tok is None or tok.text in (";", "{", "}"):
                self.fail("unbalanced generics")
            if tok.text == "<":
                depth += 1
            elif tok.text == ">":
                depth -= 1
            elif tok.text == ">>":
                depth -= 2
            elif tok.text == ">>>":
                depth -= 3
            if depth < 0:
                self.fail("unbalanced generics")
            self.pos += 1

    # -- statements ---------------------------------------------------------

    def block(self) -> Node:
        self.expect("{")
        stmts: list[Node] = []
        while not self.at("}"):
            if self.eof():
                self.fail("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return Node("block", tuple(stmts))

    def statement(self) -> Node:
        tok = self.peek()
        if tok is None:
            self.fail("expected statement")
        if tok.text == "{":
            return self.block()
        if tok.text == ";":
            self.pos += 1
            return Node("empty")
        handler = {
            "if": self.if_stmt,
            "while": self.while_stmt,
            "do": self.do_stmt,
            "for": self.for_stmt,
            "return": self.return_stmt,
            "throw": self.throw_stmt,
            "try": self.try_stmt,
            "switch": self.switch_stmt,
            "break": self.break_stmt,
            "continue": self.continue_stmt,
            "synchronized": self.synchronized_stmt,
            "assert": self.assert_stmt,
        }.get(tok.text)
        if handler is not None:
            return handler()
        if (
            tok.kind == "word"
            and tok.text not in JAVA_KEYWORDS
            and self.peek(1) is not None
            and self.peek(1).text == ":"
        ):
            self.pos += 2
            return Node("labeled", (self.statement(),))
        mark = self.pos
        try:
            return self.local_decl()
        except ParseError:
            self.pos = mark
        expr = self.expression()
        self.expect(";")
        return Node("expr_stmt", (expr,))

    def local_decl(self, consume_semi: bool = True) -> Node:
        self.modifiers()
        dtype = self.type_ref()
        declarators: list[Node] = []
        while True:
            name = self.expect_name()
            while self.at("["):
                self.expect("[")
                self.expect("]")
            init: tuple[Node, ...] = ()
            if self.accept("="):
                init = (self.var_init(),)
            declarators.append(Node("declarator", init, name))
            if not self.accept(","):
                break
        if not declarators:
            self.fail("expected declarator")
        if consume_semi:
            self.expect(";")
        return Node("var_decl", (dtype, *declarators))

    def var_init(self) -> Node:
        if self.at("{"):
            self.expect("{")
            items: list[Node] = []
            while not self.at("}"):
                items.append(self.var_init())
                if not self.accept(","):
                    break
            self.expect("}")
            return Node("array_init", tuple(items))
        return self.expression()

    def if_stmt(self) -> Node:
        self.expect("if")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.statement()
        if self.accept("else"):
            return Node("if", (cond, then, self.statement()))
        return Node("if", (cond, then))

    def while_stmt(self) -> Node:
        self.expect("while")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        return Node("while", (cond, self.statement()))

    def do_stmt(self) -> Node:
        self.expect("do")
        body = self.statement()
        self.expect("while")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        self.expect(";")
        return Node("do", (body, cond))

    def for_stmt(self) -> Node:
        self.expect("for")
        self.expect("(")
        mark = self.pos
        try:  # enhanced for: Type name : iterable
            self.modifiers()
            self.type_ref()
            name = self.expect_name()
            self.expect(":")
            iterable = self.expression()
            self.expect(")")
            body = self.statement()
            return Node("foreach", (Node("param", (), name), iterable, body))
        except ParseError:
            self.pos = mark
        init: list[Node] = []
        if not self.at(";"):
            mark = self.pos
            try:
                init.append(self.local_decl(consume_semi=False))
            except ParseError:
                self.pos = mark
                init.append(self.expression())
                while self.accept(","):
                    init.append(self.expression())
        self.expect(";")
        cond: list[Node] = []
        if not self.at(";"):
            cond.append(self.expression())
        self.expect(";")
        update: list[Node] = []
        if not self.at(")"):
            update.append(self.expression())
            while self.accept(","):
                update.append(self.expression())
        self.expect(")")
        body = self.statement()
        return Node(
            "for",
            (
                Node("for_init", tuple(init)),
                Node("for_cond", tuple(cond)),
                Node("for_update", tuple(update)),
                body,
            ),
        )

    def return_stmt(self) -> Node:
        self.expect("return")
        if self.accept(";"):
            return Node("return")
        value = self.expression()
        self.expect(";")
        return Node("return", (value,))

    def throw_stmt(self) -> Node:
        self.expect("throw")
        value = self.expression()
        self.expect(";")
        return Node("throw", (value,))

    def try_stmt(self) -> Node:
        self.expect("try")
        children: list[Node] = []
        if self.at("("):
            self.expect("(")
            while not self.at(")"):
                children.append(self.local_decl(consume_semi=False))
                if not self.accept(";"):
                    break
            self.expect(")")
        children.append(self.block())
        while self.at("catch"):
            self.expect("catch")
            self.expect("(")
            self.modifiers()
            types = [self.type_ref()]
            while self.accept("|"):
                types.append(self.type_ref())
            name = self.expect_name()
            self.expect(")")
            children.append(Node("catch", (*types, Node("param", (), name), self.block())))
        if self.accept("finally"):
            children.append(Node("finally", (self.block(),)))
        return Node("try", tuple(children))

    def switch_stmt(self) -> Node:
        self.expect("switch")
        self.expect("(")
        subject = self.expression()
        self.expect(")")
        self.expect("{")
        entries: list[Node] = []
        while not self.at("}"):
            if self.eof():
                self.fail("unterminated switch")
            if self.accept("case"):
                label = self.expression()
                self.expect(":")
                entries.append(Node("case", (label,)))
            elif self.accept("default"):
                self.expect(":")
                entries.append(Node("default_case"))
            else:
                entries.append(self.statement())
        self.expect("}")
        return Node("switch", (subject, Node("switch_body", tuple(entries))))

    def break_stmt(self) -> Node:
        self.expect("break")
        tok = self.peek()
        if tok is not None and tok.kind == "word" and tok.text not in JAVA_KEYWORDS:
            self.pos += 1
        self.expect(";")
        return Node("break")

    def continue_stmt(self) -> Node:
        self.expect("continue")
        tok = self.peek()
        if tok is not None and tok.kind == "word" and tok.text not in JAVA_KEYWORDS:
            self.pos += 1
        self.expect(";")
        return Node("continue")

    def synchronized_stmt(self) -> Node:
        self.expect("synchronized")
        self.expect("(")
        monitor = self.expression()
        self.expect(")")
        return Node("synchronized", (monitor, self.block()))

    def assert_stmt(self) -> Node:
        self.expect("assert")
        cond = self.expression()
        if self.accept(":"):
            message = self.expression()
            self.expect(";")
            return Node("assert", (cond, message))
        self.expect(";")
        return Node("assert", (cond,))

    # -- expressions --------------------------------------------------------

    _ASSIGN_OPS = frozenset(
        {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}
    )
    _BINARY_LEVELS = (
        ("||",),
        ("&&",),
        ("|",),
        ("^",),
        ("&",),
        ("==", "!="),
        ("<", ">", "<=", ">=", "instanceof"),
        ("<<", ">>", ">>>"),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def expression(self) -> Node:
        lhs = self.ternary()
        tok = self.peek()
        if tok is not None and tok.text in self._ASSIGN_OPS:
            self.pos += 1
            rhs = self.expression()
            return Node(f"assign_{tok.text}", (lhs, rhs))
        return lhs

    def ternary(self) -> Node:
        cond = self.binary(0)
        if self.accept("?"):
            then = self.expression()
            self.expect(":")
            otherwise = self.expression()
            return Node("ternary", (cond, then, otherwise))
        return cond

    def binary(self, level: int) -> Node:
        if level >= len(self._BINARY_LEVELS):
            return self.unary()
        ops = self._BINARY_LEVELS[level]
        lhs = self.binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.text not in ops:
                return lhs
            if tok.text == "instanceof":
                self.pos += 1
                lhs = Node("instanceof", (lhs, self.type_ref()))
                continue
            self.pos += 1
            rhs = self.binary(level + 1)
            lhs = Node(f"binary_{tok.text}", (lhs, rhs))

    _UNARY_OPS = frozenset({"+", "-", "!", "~", "++", "--"})
    _CAST_FOLLOW_OPS = frozenset({"!", "~"})

    def unary(self) -> Node:
        tok = self.peek()
        if tok is None:
            self.fail("expected expression")
        if tok.kind == "op" and tok.text in self._UNARY_OPS:
            self.pos += 1
            return Node(f"unary_{tok.text}", (self.unary(),))
        if tok.text == "(":
            mark = self.pos
            try:
                self.expect("(")
                cast_type = self.type_ref()
                self.expect(")")
                nxt = self.peek()
                if nxt is not None and (
                    nxt.kind in ("word", "number", "string", "char")
                    or nxt.text == "("
                    or nxt.text in self._CAST_FOLLOW_OPS
                ) and nxt.text != "instanceof":
                    return Node("cast", (cast_type, self.unary()))
                raise ParseError("not a cast", self.pos)
            except ParseError:
                self.pos = mark
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while True:
            tok = self.peek()
            if tok is None:
                return node
            if tok.text == ".":
                self.pos += 1
                name = self.expect_word_any()
                if self.at("("):
                    args = self.arg_list()
                    node = Node("method_call", (node, Node("member", (), name), args))
                else:
                    node = Node("field_access", (node, Node("member", (), name)))
            elif tok.text == "(":
                args = self.arg_list()
                callee = (
                    Node("callee", (), node.text) if node.kind == "ident" else node
                )
                node = Node("method_call", (callee, args))
            elif tok.text == "[":
                self.pos += 1
                index = self.expression()
                self.expect("]")
                node = Node("index", (node, index))
            elif tok.text in ("++", "--"):
                self.pos += 1
                node = Node(f"postfix_{tok.text}", (node,))
            elif tok.text == "::":
                self.pos += 1
                name = self.expect_word_any()
                node = Node("method_ref", (node, Node("member", (), name)))
            else:
                return node

    def arg_list(self) -> Node:
        self.expect("(")
        args: list[Node] = []
        while not self.at(")"):
            args.append(self.expression())
            if not self.accept(","):
                break
        self.expect(")")
        return Node("args", tuple(args))

    def primary(self) -> Node:
        tok = self.peek()
        if tok is None:
            self.fail("expected expression")
        if tok.kind == "number":
            self.pos += 1
            return Node("number")
        if tok.kind == "string":
            self.pos += 1
            return Node("string")
        if tok.kind == "char":
            self.pos += 1
            return Node("char")
        if tok.kind == "word":
            if tok.text in ("true", "false"):
                self.pos += 1
                return Node("bool")
            if tok.text == "null":
                self.pos += 1
                return Node("null")
            if tok.text == "this":
                self.pos += 1
                return Node("this")
            if tok.text == "super":
                self.pos += 1
                return Node("super")
            if tok.text == "new":
                return self.creator()
            if tok.text in JAVA_KEYWORDS:
                self.fail(f"unexpected keyword {tok.text!r}")
            nxt = self.peek(1)
            if nxt is not None and nxt.text == "->":
                self.pos += 2
                body = self.block() if self.at("{") else self.expression()
                return Node("lambda", (Node("param", (), tok.text), body))
            self.pos += 1
            return Node("ident", (), tok.text)
        if tok.text == "(":
            lambda_node = self.try_paren_lambda()
            if lambda_node is not None:
                return lambda_node
            self.expect("(")
            inner = self.expression()
            self.expect(")")
            return Node("paren", (inner,))
        self.fail(f"unexpected token {tok.text!r}")

    def try_paren_lambda(self) -> Node | None:
        # Cheap lookahead: a balanced (...) immediately followed by ->
        depth = 0
        idx = self.pos
        while idx < len(self.tokens):
            text = self.tokens[idx].text
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    break
            elif text in (";", "{"):
                return None
            idx += 1
        if depth != 0 or idx + 1 >= len(self.tokens):
            return None
        if self.tokens[idx + 1].text != "->":
            return None
        self.expect("(")
        params: list[Node] = []
        while not self.at(")"):
            mark = self.pos
            try:
                self.modifiers()
                self.type_ref()
                name = self.expect_name()
            except ParseError:
                self.pos = mark
                name = self.expect_name()
            params.append(Node("param", (), name))
            if not self.accept(","):
                break
        self.expect(")")
        self.expect("->")
        body = self.block() if self.at("{") else self.expression()
        return Node("lambda", (*params, body))

    def creator(self) -> Node:
        self.expect("new")
        ctype = self.type_ref()
        if self.at("["):
            dims: list[Node] = []
            while self.at("["):
                self.expect("[")
                if not self.at("]"):
                    dims.append(self.expression())
                self.expect("]")
            if self.at("{"):
                dims.append(self.var_init())
            return Node("new_array", (ctype, *dims))
        args = self.arg_list()
        if self.at("{"):
            self.expect("{")
            members: list[Node] = []
            while not self.at("}"):
                if self.eof():
                    self.fail("unterminated anonymous class body")
                members.append(self.item())
            self.expect("}")
            return Node("new", (ctype, args, Node("anon_class", tuple(members))))
        return Node("new", (ctype, args))
