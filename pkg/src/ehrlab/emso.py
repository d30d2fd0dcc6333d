"""Parsing and brute-force evaluation of monadic second-order sentences.

Sentences quantify existentially over node sets in an outermost prefix and
then speak first-order about parenthood, equality, set membership, and the
root constant.  Evaluation enumerates every set assignment as a bitmask and
recurses over the first-order matrix, so it is only usable on small trees.

The advertised correspondence between a sentence's shape and game parameters
(number of set quantifiers, first-order quantifier rank) is an assumption
about which game instances are relevant to the sentence, not a theorem this
module checks; ``ehr_parameters_of`` merely reads the shape off the AST.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import GuardExceededError, LassoUnsupportedError, SentenceSyntaxError
from .trees import RootedTree

_KEYWORDS = frozenset(
    ["EXISTS-SET", "FORALL", "EXISTS", "PARENT", "IN", "ROOT", "AND", "OR", "NOT"]
)


# --- AST -------------------------------------------------------------------
#
# Terms name nodes; formulas are built from three atom kinds, the unary and
# binary connectives, and node quantifiers.  SetExists may structurally sit
# anywhere, but parsing and evaluation both insist on prefix-only placement.


@dataclass(frozen=True)
class Root:
    pass


@dataclass(frozen=True)
class Var:
    name: str


Term = Root | Var


@dataclass(frozen=True)
class Member:
    term: Term
    set_name: str


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term


@dataclass(frozen=True)
class ParentIs:
    # True iff ``child`` has a parent and that parent is ``parent``.
    child: Term
    parent: Term


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForallNode:
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsNode:
    var: str
    body: Formula


@dataclass(frozen=True)
class SetExists:
    set_name: str
    body: Formula


Formula = (
    Member
    | Equals
    | ParentIs
    | Not
    | And
    | Or
    | Implies
    | ForallNode
    | ExistsNode
    | SetExists
)

Sentence = Formula


# --- tokenizer --------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # WORD, ARROW, LPAREN, RPAREN, DOT, EQUALS, END
    text: str
    position: int


def strip_comments(text: str) -> str:
    """Remove ``--`` line comments, keeping newlines so positions stay sane."""
    lines = []
    for line in text.split("\n"):
        cut = line.find("--")
        lines.append(line if cut < 0 else line[:cut])
    return "\n".join(lines)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(_Token("RPAREN", ch, i))
            i += 1
        elif ch == ".":
            tokens.append(_Token("DOT", ch, i))
            i += 1
        elif ch == "=":
            tokens.append(_Token("EQUALS", ch, i))
            i += 1
        elif ch == "-":
            if text.startswith("->", i):
                tokens.append(_Token("ARROW", "->", i))
                i += 2
            else:
                raise SentenceSyntaxError("stray '-'", i)
        elif ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            # A hyphen continues the word only inside the one hyphenated
            # keyword; plain names must not contain '-'.
            if i < n and text[i] == "-" and not text.startswith("->", i):
                while i < n and (text[i].isalnum() or text[i] in "_-"):
                    i += 1
                word = text[start:i]
                if word not in _KEYWORDS:
                    raise SentenceSyntaxError(f"name may not contain '-': {word!r}", start)
            else:
                word = text[start:i]
            tokens.append(_Token("WORD", word, start))
        else:
            raise SentenceSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("END", "", n))
    return tokens


# --- parser -----------------------------------------------------------------
#
# Precedence, loosest first: ->  (right associative), OR, AND, NOT.  A node
# quantifier binds everything to its right within the enclosing parentheses.


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise SentenceSyntaxError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.position)
        return tok

    def expect_name(self, what: str) -> _Token:
        tok = self.next()
        if tok.kind != "WORD" or tok.text in _KEYWORDS:
            raise SentenceSyntaxError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.position)
        return tok

    def sentence(self) -> Formula:
        set_names: list[str] = []
        while self.peek().kind == "WORD" and self.peek().text == "EXISTS-SET":
            self.next()
            name = self.expect_name("a set name")
            if name.text in set_names:
                raise SentenceSyntaxError(f"set {name.text!r} quantified twice", name.position)
            set_names.append(name.text)
            self.expect("DOT", "'.'")
        body = self.formula(frozenset(set_names), frozenset())
        end = self.next()
        if end.kind != "END":
            raise SentenceSyntaxError(f"trailing input starting at {end.text!r}", end.position)
        for name in reversed(set_names):
            body = SetExists(name, body)
        return body

    def formula(self, sets: frozenset[str], vars_: frozenset[str]) -> Formula:
        left = self.disjunction(sets, vars_)
        if self.peek().kind == "ARROW":
            self.next()
            right = self.formula(sets, vars_)
            return Implies(left, right)
        return left

    def disjunction(self, sets: frozenset[str], vars_: frozenset[str]) -> Formula:
        left = self.conjunction(sets, vars_)
        while self.peek().kind == "WORD" and self.peek().text == "OR":
            self.next()
            left = Or(left, self.conjunction(sets, vars_))
        return left

    def conjunction(self, sets: frozenset[str], vars_: frozenset[str]) -> Formula:
        left = self.unary(sets, vars_)
        while self.peek().kind == "WORD" and self.peek().text == "AND":
            self.next()
            left = And(left, self.unary(sets, vars_))
        return left

    def unary(self, sets: frozenset[str], vars_: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.next()
            inner = self.formula(sets, vars_)
            self.expect("RPAREN", "')'")
            return inner
        if tok.kind == "WORD" and tok.text == "NOT":
            self.next()
            return Not(self.unary(sets, vars_))
        if tok.kind == "WORD" and tok.text in ("FORALL", "EXISTS"):
            self.next()
            name = self.expect_name("a node variable")
            if name.text in vars_:
                raise SentenceSyntaxError(f"variable {name.text!r} shadows an outer binding", name.position)
            if name.text in sets:
                raise SentenceSyntaxError(f"{name.text!r} is already a set name", name.position)
            self.expect("DOT", "'.'")
            body = self.formula(sets, vars_ | {name.text})
            return ForallNode(name.text, body) if tok.text == "FORALL" else ExistsNode(name.text, body)
        if tok.kind == "WORD" and tok.text == "EXISTS-SET":
            raise SentenceSyntaxError("set quantifiers must lead the sentence", tok.position)
        return self.atom(sets, vars_)

    def atom(self, sets: frozenset[str], vars_: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "WORD" and tok.text == "PARENT":
            self.next()
            self.expect("LPAREN", "'('")
            child = self.term(vars_)
            self.expect("RPAREN", "')'")
            self.expect("EQUALS", "'='")
            parent = self.term(vars_)
            return ParentIs(child, parent)
        left = self.term(vars_)
        follow = self.next()
        if follow.kind == "EQUALS":
            return Equals(left, self.term(vars_))
        if follow.kind == "WORD" and follow.text == "IN":
            name = self.expect_name("a set name")
            if name.text not in sets:
                raise SentenceSyntaxError(f"set {name.text!r} is not quantified", name.position)
            return Member(left, name.text)
        raise SentenceSyntaxError(
            f"expected '=' or 'IN' after a term, found {follow.text or 'end of input'!r}",
            follow.position,
        )

    def term(self, vars_: frozenset[str]) -> Term:
        tok = self.next()
        if tok.kind == "WORD" and tok.text == "ROOT":
            return Root()
        if tok.kind == "WORD" and tok.text not in _KEYWORDS:
            if tok.text not in vars_:
                raise SentenceSyntaxError(f"unbound variable {tok.text!r}", tok.position)
            return Var(tok.text)
        raise SentenceSyntaxError(
            f"expected ROOT or a bound variable, found {tok.text or 'end of input'!r}",
            tok.position,
        )


def parse_sentence(text: str) -> Sentence:
    """Parse one sentence.  Set quantifiers may appear only as a prefix."""
    return _Parser(_tokenize(strip_comments(text))).sentence()


def parse_sentence_file(text: str) -> Sentence:
    """Parse a sentence file: UTF-8 text, ``--`` comments, one sentence."""
    return parse_sentence(text)


# --- pretty printer ----------------------------------------------------------


def _term_text(term: Term) -> str:
    return "ROOT" if isinstance(term, Root) else term.name


def unparse(sentence: Sentence) -> str:
    """Render a sentence; ``parse_sentence`` of the result rebuilds it."""
    if isinstance(sentence, SetExists):
        return f"EXISTS-SET {sentence.set_name}. {unparse(sentence.body)}"
    if isinstance(sentence, Member):
        return f"({_term_text(sentence.term)} IN {sentence.set_name})"
    if isinstance(sentence, Equals):
        return f"({_term_text(sentence.left)} = {_term_text(sentence.right)})"
    if isinstance(sentence, ParentIs):
        return f"(PARENT({_term_text(sentence.child)}) = {_term_text(sentence.parent)})"
    if isinstance(sentence, Not):
        return f"(NOT {unparse(sentence.body)})"
    if isinstance(sentence, And):
        return f"({unparse(sentence.left)} AND {unparse(sentence.right)})"
    if isinstance(sentence, Or):
        return f"({unparse(sentence.left)} OR {unparse(sentence.right)})"
    if isinstance(sentence, Implies):
        return f"({unparse(sentence.left)} -> {unparse(sentence.right)})"
    if isinstance(sentence, ForallNode):
        return f"(FORALL {sentence.var}. {unparse(sentence.body)})"
    if isinstance(sentence, ExistsNode):
        return f"(EXISTS {sentence.var}. {unparse(sentence.body)})"
    raise TypeError(f"not a sentence node: {sentence!r}")


# --- shape and parameters ----------------------------------------------------


def quantifier_rank(formula: Formula) -> int:
    """Nesting depth of node quantifiers; set quantifiers do not count."""
    if isinstance(formula, (Member, Equals, ParentIs)):
        return 0
    if isinstance(formula, Not):
        return quantifier_rank(formula.body)
    if isinstance(formula, (And, Or, Implies)):
        return max(quantifier_rank(formula.left), quantifier_rank(formula.right))
    if isinstance(formula, (ForallNode, ExistsNode)):
        return 1 + quantifier_rank(formula.body)
    if isinstance(formula, SetExists):
        return quantifier_rank(formula.body)
    raise TypeError(f"not a formula node: {formula!r}")


def _split_prefix(sentence: Sentence) -> tuple[tuple[str, ...], Formula]:
    names: list[str] = []
    body = sentence
    while isinstance(body, SetExists):
        names.append(body.set_name)
        body = body.body
    if _contains_set_quantifier(body):
        raise SentenceSyntaxError("set quantifiers must lead the sentence")
    return tuple(names), body


def _contains_set_quantifier(formula: Formula) -> bool:
    if isinstance(formula, SetExists):
        return True
    if isinstance(formula, Not):
        return _contains_set_quantifier(formula.body)
    if isinstance(formula, (And, Or, Implies)):
        return _contains_set_quantifier(formula.left) or _contains_set_quantifier(formula.right)
    if isinstance(formula, (ForallNode, ExistsNode)):
        return _contains_set_quantifier(formula.body)
    return False


def ehr_parameters_of(sentence: Sentence) -> tuple[int, int]:
    """(number of set quantifiers, first-order rank of the matrix).

    These are the game parameters a set-pebble game for this sentence would
    use.  Reading them off the shape assumes that correspondence; see the
    module docstring.
    """
    names, body = _split_prefix(sentence)
    return len(names), quantifier_rank(body)


# --- evaluation ---------------------------------------------------------------


def evaluate_matrix(formula: Formula, tree: RootedTree, sets: dict[str, int]) -> bool:
    """Evaluate a first-order formula under fixed set bitmasks."""
    if tree.lasso is not None:
        raise LassoUnsupportedError("sentence evaluation requires a finite tree")

    def run(f: Formula, env: dict[str, int]) -> bool:
        if isinstance(f, Member):
            return (sets[f.set_name] >> node_of(f.term, env)) & 1 == 1
        if isinstance(f, Equals):
            return node_of(f.left, env) == node_of(f.right, env)
        if isinstance(f, ParentIs):
            child = node_of(f.child, env)
            if child == tree.root:
                return False
            return tree.parents[child] == node_of(f.parent, env)
        if isinstance(f, Not):
            return not run(f.body, env)
        if isinstance(f, And):
            return run(f.left, env) and run(f.right, env)
        if isinstance(f, Or):
            return run(f.left, env) or run(f.right, env)
        if isinstance(f, Implies):
            return (not run(f.left, env)) or run(f.right, env)
        if isinstance(f, ForallNode):
            return all(run(f.body, {**env, f.var: v}) for v in range(tree.size))
        if isinstance(f, ExistsNode):
            return any(run(f.body, {**env, f.var: v}) for v in range(tree.size))
        raise SentenceSyntaxError("set quantifiers must lead the sentence")

    def node_of(term: Term, env: dict[str, int]) -> int:
        return tree.root if isinstance(term, Root) else env[term.name]

    return run(formula, {})


def evaluate(sentence: Sentence, tree: RootedTree, assignment_guard: int = 1 << 20) -> bool:
    """Brute-force truth of a sentence on a finite tree.

    Enumerates all 2**(n_sets * size) set assignments; refuses with
    GuardExceededError when that count exceeds ``assignment_guard``.
    """
    if tree.lasso is not None:
        raise LassoUnsupportedError("sentence evaluation requires a finite tree")
    names, body = _split_prefix(sentence)
    total = 1 << (len(names) * tree.size)
    if total > assignment_guard:
        raise GuardExceededError("set assignment space", total, assignment_guard)
    for masks in itertools.product(range(1 << tree.size), repeat=len(names)):
        if evaluate_matrix(body, tree, dict(zip(names, masks))):
            return True
    return False
