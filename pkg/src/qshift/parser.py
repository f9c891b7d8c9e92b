"""Concrete syntax: formulas, sequents, proof files, Kripke models, CD5 interpretations.

Formula grammar (precedence from tightest): ``~`` and the quantifier prefixes
``forall x.`` / ``exists x.``, then ``&``, ``|``, ``->``.  ``&`` and ``|``
associate to the left, ``->`` to the right.  So ``forall x. A(x) -> B`` is
``(forall x. A(x)) -> B``; write ``forall x. (A(x) -> B)`` for the other reading.
Predicates start with an uppercase letter, variables and function symbols
with a lowercase one.  ``T`` is truth and ``_|_`` falsity.

A bare lowercase identifier is a variable unless it is declared as a constant
(``constants=`` argument, or an ``@constants`` line in a file); ``c()`` is
always a constant.

Files may carry ``#`` comments and ``@key value`` directive lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .core import (
    Atom, Bottom, Top, And, Or, Implies, Forall, Exists, Var, Fn, Sequent,
    BOTTOM, TOP, is_neg, QUANTIFIERS,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, expected: Iterable[str] = (), line: int | None = None):
        self.message = message
        self.span = span
        self.expected = frozenset(expected)
        self.line = line
        where = f"line {line}, " if line is not None else ""
        exp = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{where}offset {span.start}: {message}{exp}")


# --- tokens ----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>->|=>|_\|_|[&|~(),.;])
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
""", re.VERBOSE)

KEYWORDS = {"forall", "exists", "T"}


@dataclass
class Token:
    kind: str  # "op", "ident", "eof"
    text: str
    start: int
    end: int


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


def tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            s = _byte_offset(text, i)
            raise ParseError(f"unexpected character {text[i]!r}", SourceSpan(s, s + 1))
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), _byte_offset(text, m.start()), _byte_offset(text, m.end())))
        i = m.end()
    end = _byte_offset(text, len(text))
    out.append(Token("eof", "", end, end))
    return out


class _Parser:
    def __init__(self, text: str, constants: Iterable[str] = ()):
        self.toks = tokenize(text)
        self.i = 0
        self.constants = set(constants)

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected: Iterable[str], message: str | None = None):
        t = self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(message or f"unexpected {shown}", SourceSpan(t.start, max(t.end, t.start)), expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.fail([repr(text)])

    def at_end(self) -> bool:
        return self.tok.kind == "eof"

    # formulas
    def formula(self):
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self):
        t = self.tok
        if self.accept("~"):
            return Implies(self.unary(), BOTTOM)
        if t.kind == "ident" and t.text in ("forall", "exists"):
            self.i += 1
            v = self.tok
            if v.kind != "ident" or not v.text[0].islower() or v.text in KEYWORDS:
                self.fail(["variable"])
            self.i += 1
            self.expect(".")
            body = self.unary()
            return (Forall if t.text == "forall" else Exists)(v.text, body)
        return self.primary()

    def primary(self):
        t = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("_|_"):
            return BOTTOM
        if t.kind == "ident" and t.text == "T":
            self.i += 1
            return TOP
        if t.kind == "ident" and t.text[0].isupper():
            self.i += 1
            args = ()
            if self.accept("("):
                args = self.term_list()
            return Atom(t.text, args)
        self.fail(["formula"])

    def term_list(self) -> tuple:
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self):
        t = self.tok
        if t.kind != "ident" or not t.text[0].islower() or t.text in KEYWORDS:
            self.fail(["term"])
        self.i += 1
        if self.accept("("):
            if self.accept(")"):
                return Fn(t.text, ())
            return Fn(t.text, self.term_list())
        if t.text in self.constants:
            return Fn(t.text, ())
        return Var(t.text)

    def formula_list(self, stop: str) -> list:
        out = []
        if (self.tok.kind == "op" and self.tok.text == stop) or self.at_end():
            return out
        out.append(self.formula())
        while self.accept(","):
            out.append(self.formula())
        return out

    def sequent(self) -> Sequent:
        left = self.formula_list("=>")
        self.expect("=>")
        right = self.formula_list("")
        return Sequent(left, right)

    def finish(self):
        if not self.at_end():
            self.fail(["end of input"])


def parse_formula(text: str, constants: Iterable[str] = ()):
    p = _Parser(text, constants)
    f = p.formula()
    p.finish()
    return f


def parse_term(text: str, constants: Iterable[str] = ()):
    p = _Parser(text, constants)
    t = p.term()
    p.finish()
    return t


def parse_sequent(text: str, constants: Iterable[str] = ()) -> Sequent:
    p = _Parser(text, constants)
    s = p.sequent()
    p.finish()
    return s


# --- printing --------------------------------------------------------------


def render_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol
    return f"{t.symbol}({','.join(render_term(a) for a in t.args)})"


def _fmt(f, prec: int) -> str:
    # prec: 1 ->, 2 |, 3 &, 4 unary
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, Bottom):
        return "_|_"
    if isinstance(f, Top):
        return "T"
    if isinstance(f, QUANTIFIERS):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"{q} {f.var}. {_fmt(f.body, 4)}"
    if is_neg(f):
        return "~" + _fmt(f.left, 4)
    own = {Implies: 1, Or: 2, And: 3}[type(f)]
    if isinstance(f, Implies):
        s = f"{_fmt(f.left, 2)} -> {_fmt(f.right, 1)}"
    elif isinstance(f, Or):
        s = f"{_fmt(f.left, 2)} | {_fmt(f.right, 3)}"
    else:
        s = f"{_fmt(f.left, 3)} & {_fmt(f.right, 4)}"
    return f"({s})" if own < prec else s


def render(x) -> str:
    """Text form of a term, formula, sequent or proof."""
    from .calculus import Proof

    if isinstance(x, (Var, Fn)):
        return render_term(x)
    if isinstance(x, Sequent):
        left = ", ".join(_fmt(g, 1) for g in x.antecedent)
        right = ", ".join(_fmt(g, 1) for g in x.succedent)
        return f"{left} => {right}".strip()
    if isinstance(x, Proof):
        return dump_proof(x)
    return _fmt(x, 1)


# --- file helpers ----------------------------------------------------------


@dataclass
class Document:
    directives: list = field(default_factory=list)  # (key, value, line)
    lines: list = field(default_factory=list)  # (line number, raw text)

    def get(self, key: str) -> list:
        return [v for k, v, _ in self.directives if k == key]

    def constants(self) -> list:
        out = []
        for v in self.get("constants"):
            out.extend(v.replace(",", " ").split())
        return out


def read_document(text: str) -> Document:
    doc = Document()
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("@"):
            key, _, value = s[1:].partition(" ")
            doc.directives.append((key.strip(), value.strip(), n))
            continue
        doc.lines.append((n, raw.rstrip()))
    return doc


def _at_line(fn, line: int, *args, **kw):
    try:
        return fn(*args, **kw)
    except ParseError as e:
        raise ParseError(e.message, e.span, e.expected, line) from None


def parse_formula_file(text: str) -> tuple:
    """Each non-comment line holds one formula.  Returns (formulas, document)."""
    doc = read_document(text)
    consts = doc.constants()
    return [_at_line(parse_formula, n, s.strip(), consts) for n, s in doc.lines], doc


def parse_sequent_file(text: str) -> tuple:
    doc = read_document(text)
    consts = doc.constants()
    return [_at_line(parse_sequent, n, s.strip(), consts) for n, s in doc.lines], doc


# --- proofs ----------------------------------------------------------------


def parse_proof(text: str, constants: Iterable[str] = ()):
    """Parse the indented proof format; returns (Proof, Document)."""
    from .calculus import Proof, RULES

    doc = read_document(text)
    consts = list(constants) + doc.constants()
    entries = []
    for n, raw in doc.lines:
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2:
            raise ParseError("indentation must be a multiple of two spaces", SourceSpan(0, indent), line=n)
        head, sep, seq_text = raw.strip().partition(";")
        if not sep:
            raise ParseError("missing ';' before the conclusion", SourceSpan(0, len(raw)), ["';'"], line=n)
        parts = head.split(None, 2)
        if not parts:
            raise ParseError("missing rule name", SourceSpan(indent, indent), ["rule"], line=n)
        rule = parts[0]
        if rule not in RULES:
            raise ParseError(f"unknown rule {rule!r}", SourceSpan(indent, indent + len(rule)), ["rule"], line=n)
        index = None
        rest = parts[1:]
        if rest and re.fullmatch(r"\d+", rest[0]):
            index = int(rest[0])
            rest = rest[1:]
        annot = " ".join(rest).strip()
        term = _at_line(parse_term, n, annot, consts) if annot else None
        seq = _at_line(parse_sequent, n, seq_text.strip(), consts)
        entries.append((indent // 2, n, rule, index, term, seq))
    if not entries:
        raise ParseError("empty proof", SourceSpan(0, 0), ["rule"])

    pos = 0

    def build(level: int):
        nonlocal pos
        lvl, n, rule, index, term, seq = entries[pos]
        if lvl != level:
            raise ParseError("unexpected indentation", SourceSpan(0, 2 * lvl), line=n)
        pos += 1
        kids = []
        while pos < len(entries) and entries[pos][0] > level:
            kids.append(build(level + 1))
        return Proof(rule, seq, tuple(kids), index, term)

    root = build(0)
    if pos != len(entries):
        n = entries[pos][1]
        raise ParseError("more than one root", SourceSpan(0, 0), line=n)
    return root, doc


def proof_constants(p) -> list:
    from .core import formula_terms

    seen = []
    for node in p.nodes():
        for g in node.conclusion.formulas():
            for t in formula_terms(g):
                if isinstance(t, Fn) and not t.args and t.symbol not in seen:
                    seen.append(t.symbol)
        if node.term is not None:
            from .core import term_subterms
            for t in term_subterms(node.term):
                if isinstance(t, Fn) and not t.args and t.symbol not in seen:
                    seen.append(t.symbol)
    return seen


def dump_proof(p, header: bool = True) -> str:
    lines = []
    consts = proof_constants(p)
    if header and consts:
        lines.append("@constants " + " ".join(consts))

    def go(node, level):
        head = node.rule
        if node.index is not None:
            head += f" {node.index}"
        if node.term is not None:
            head += f" {render_term(node.term)}"
        lines.append(f"{'  ' * level}{head} ; {render(node.conclusion)}")
        for k in node.premises:
            go(k, level + 1)

    go(p, 0)
    return "\n".join(lines) + "\n"


# --- Kripke models ---------------------------------------------------------


def _names(text: str) -> list:
    return text.replace(",", " ").split()


def _element(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Fn) and not t.args:
        return t.symbol
    raise ValueError(f"not a domain element: {render_term(t)}")


def parse_model(text: str):
    """Kripke model file.  Lines::

        worlds: w v1 v2
        order: w < v1, w < v2
        domain: a b          (every world)
        domain v1: a b c     (one world)
        force v1: P(a), Q
    """
    from .kripke import Frame, Model

    doc = read_document(text)
    worlds: list = []
    pairs: list = []
    default_domain = None
    domains: dict = {}
    forced: list = []
    for n, raw in doc.lines:
        s = raw.strip()
        key, sep, value = s.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", SourceSpan(0, len(s)), ["':'"], line=n)
        words = key.split()
        if words == ["worlds"]:
            worlds.extend(_names(value))
        elif words == ["order"]:
            for chunk in value.split(","):
                if not chunk.strip():
                    continue
                chain = [c.strip() for c in chunk.split("<")]
                if len(chain) < 2 or not all(chain):
                    raise ParseError("order pairs are written 'u < v'", SourceSpan(0, len(s)), ["'<'"], line=n)
                pairs.extend(zip(chain, chain[1:]))
        elif words and words[0] == "domain":
            if len(words) == 1:
                default_domain = _names(value)
            else:
                for w in words[1:]:
                    domains[w] = _names(value)
        elif words and words[0] == "force" and len(words) == 2:
            for chunk in _split_top(value):
                f = _at_line(parse_formula, n, chunk)
                if not isinstance(f, Atom):
                    raise ParseError("only atoms can be forced directly", SourceSpan(0, len(s)), ["atom"], line=n)
                forced.append((words[1], f.pred, tuple(_element(a) for a in f.args), n))
        else:
            raise ParseError(f"unknown key {key!r}", SourceSpan(0, len(key)), ["worlds", "order", "domain", "force"], line=n)
    for w in list(domains) + [p for pair in pairs for p in pair] + [f[0] for f in forced]:
        if w not in worlds:
            worlds.append(w)
    dom = {w: domains.get(w, default_domain or []) for w in worlds}
    frame = Frame(worlds, pairs, dom)
    val: dict = {}
    for w, pred, args, n in forced:
        val.setdefault(pred, {}).setdefault(w, set()).add(args)
    return Model.from_forced(frame, val), doc


def _split_top(text: str) -> list:
    """Split at commas outside parentheses."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [c.strip() for c in out if c.strip()]


def dump_model(m) -> str:
    fr = m.frame
    lines = ["worlds: " + " ".join(fr.worlds)]
    cover = fr.covers()
    if cover:
        lines.append("order: " + ", ".join(f"{u} < {v}" for u, v in cover))
    for w in fr.worlds:
        lines.append(f"domain {w}: " + " ".join(sorted(fr.domains[w])))
    for w in fr.worlds:
        atoms_here = []
        for pred in sorted(m.valuation):
            for args in sorted(m.valuation[pred].get(w, ())):
                atoms_here.append(pred + (f"({','.join(args)})" if args else ""))
        if atoms_here:
            lines.append(f"force {w}: " + ", ".join(atoms_here))
    return "\n".join(lines) + "\n"


# --- CD5 interpretations ---------------------------------------------------


def parse_interpretation(text: str):
    """CD5 interpretation file.  Lines::

        domain: a b
        P(a) = 100
        Q = 110
        f(a) = b
    """
    from .cd5 import Interpretation, value_from_bits

    doc = read_document(text)
    domain = None
    preds: dict = {}
    funcs: dict = {}
    for n, raw in doc.lines:
        s = raw.strip()
        if s.startswith("domain"):
            _, _, value = s.partition(":")
            domain = _names(value)
            continue
        lhs, sep, rhs = s.partition("=")
        if not sep:
            raise ParseError("expected 'lhs = value'", SourceSpan(0, len(s)), ["'='"], line=n)
        lhs, rhs = lhs.strip(), rhs.strip()
        if lhs[:1].isupper():
            a = _at_line(parse_formula, n, lhs)
            if not isinstance(a, Atom):
                raise ParseError("left side must be an atom", SourceSpan(0, len(lhs)), ["atom"], line=n)
            try:
                v = value_from_bits(rhs)
            except ValueError as e:
                raise ParseError(str(e), SourceSpan(len(lhs), len(s)), ["lattice value"], line=n) from None
            preds.setdefault(a.pred, {})[tuple(_element(t) for t in a.args)] = v
        else:
            t = _at_line(parse_term, n, lhs)
            sym = t.symbol if isinstance(t, Fn) else t.name
            args = tuple(_element(x) for x in t.args) if isinstance(t, Fn) else ()
            funcs.setdefault(sym, {})[args] = rhs
    if domain is None:
        raise ParseError("missing 'domain:' line", SourceSpan(0, 0), ["domain"])
    return Interpretation(domain, preds, funcs), doc


def load(path: str | Path):
    """Load any fixture by extension."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    ext = path.suffix
    if ext == ".fml":
        return parse_formula_file(text)
    if ext == ".seq":
        return parse_sequent_file(text)
    if ext == ".prf":
        return parse_proof(text)
    if ext == ".krp":
        return parse_model(text)
    if ext == ".cd5":
        return parse_interpretation(text)
    raise ValueError(f"unknown fixture extension {ext!r}")
