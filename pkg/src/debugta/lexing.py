"""C-family lexer shared by retrieval, alignment, and plagiarism checks.

The scanner is deliberately simple: it recognizes identifiers, numbers,
string/character literals, comments, include paths, and operator/punctuation
tokens, each with its source span. It does not expand macros or track scope;
callers that rename identifiers rely on the span information to leave string
contents, comments, and include paths untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

IDENT = "ident"
NUMBER = "number"
STRING = "string"
CHAR = "char"
COMMENT = "comment"
INCLUDE_PATH = "include_path"
DIRECTIVE = "directive"  # the name right after a line-leading '#'
PUNCT = "punct"

# Multi-character operators, longest first so greedy matching is correct.
_OPERATORS = (
    "<<=", ">>=", "...", "->*",
    "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "##",
)

CPP_KEYWORDS = frozenset(
    """
    alignas alignof and and_eq asm auto bitand bitor bool break case catch
    char char8_t char16_t char32_t class compl concept const consteval
    constexpr constinit const_cast continue co_await co_return co_yield
    decltype default delete do double dynamic_cast else enum explicit export
    extern false float for friend goto if inline int long mutable namespace
    new noexcept not not_eq nullptr operator or or_eq private protected
    public register reinterpret_cast requires return short signed sizeof
    static static_assert static_cast struct switch template this thread_local
    throw true try typedef typeid typename union unsigned using virtual void
    volatile wchar_t while xor xor_eq
    """.split()
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def _scan_quoted(source: str, i: int, quote: str) -> int:
    """Return the index just past a quoted literal starting at ``i``."""
    n = len(source)
    j = i + 1
    while j < n:
        ch = source[j]
        if ch == "\\" and j + 1 < n:
            j += 2
            continue
        if ch == quote:
            return j + 1
        if ch == "\n":  # unterminated literal: stop at end of line
            return j
        j += 1
    return n


def scan(source: str) -> list[Token]:
    """Tokenize C/C++ source, preserving spans; whitespace is skipped."""
    tokens: list[Token] = []
    i, n = 0, len(source)
    line_start = True
    include_state = 0  # 1 after a line-leading '#', 2 after '#include'

    while i < n:
        ch = source[i]
        if ch == "\n":
            line_start = True
            include_state = 0
            i += 1
            continue
        if ch in " \t\r\v\f":
            i += 1
            continue

        if ch == "/" and source.startswith("//", i):
            j = source.find("\n", i)
            j = n if j == -1 else j
            tokens.append(Token(COMMENT, source[i:j], i, j))
            i = j
            continue
        if ch == "/" and source.startswith("/*", i):
            j = source.find("*/", i + 2)
            j = n if j == -1 else j + 2
            tokens.append(Token(COMMENT, source[i:j], i, j))
            i = j
            continue

        if include_state == 2 and ch == "<":
            j = source.find(">", i + 1)
            line_end = source.find("\n", i + 1)
            if j == -1 or (line_end != -1 and line_end < j):
                j = line_end if line_end != -1 else n
            else:
                j += 1
            tokens.append(Token(INCLUDE_PATH, source[i:j], i, j))
            include_state = 0
            line_start = False
            i = j
            continue
        if ch == '"':
            j = _scan_quoted(source, i, '"')
            kind = INCLUDE_PATH if include_state == 2 else STRING
            tokens.append(Token(kind, source[i:j], i, j))
            include_state = 0
            line_start = False
            i = j
            continue
        if ch == "'":
            j = _scan_quoted(source, i, "'")
            tokens.append(Token(CHAR, source[i:j], i, j))
            include_state = 0
            line_start = False
            i = j
            continue

        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            if include_state == 1:
                tokens.append(Token(DIRECTIVE, text, i, j))
                include_state = 2 if text == "include" else 0
            else:
                tokens.append(Token(IDENT, text, i, j))
                include_state = 0
            line_start = False
            i = j
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            # pp-number: digits, letters, '.', '_', and exponent signs
            j = i + 1
            while j < n:
                cj = source[j]
                if cj.isalnum() or cj in "._":
                    j += 1
                elif cj in "+-" and source[j - 1] in "eEpP":
                    j += 1
                else:
                    break
            tokens.append(Token(NUMBER, source[i:j], i, j))
            include_state = 0
            line_start = False
            i = j
            continue

        if ch == "#" and line_start:
            tokens.append(Token(PUNCT, "#", i, i + 1))
            include_state = 1
            line_start = False
            i += 1
            continue

        matched = None
        for op in _OPERATORS:
            if source.startswith(op, i):
                matched = op
                break
        if matched is None:
            matched = ch
        tokens.append(Token(PUNCT, matched, i, i + len(matched)))
        include_state = 0
        line_start = False
        i += len(matched)

    return tokens


def lexical_tokens(source: str) -> list[str]:
    """Token stream used for similarity: comments dropped, literal contents dropped.

    String and character literals contribute only their empty husk so that two
    programs differing solely in message text look identical here.
    """
    out: list[str] = []
    for tok in scan(source):
        if tok.kind == COMMENT:
            continue
        if tok.kind == STRING:
            out.append('""')
        elif tok.kind == CHAR:
            out.append("''")
        else:
            out.append(tok.text)
    return out


def identifier_set(source: str) -> set[str]:
    """All identifiers in ``source``, excluding C++ keywords."""
    return {
        tok.text
        for tok in scan(source)
        if tok.kind == IDENT and tok.text not in CPP_KEYWORDS
    }


def rename_identifiers(source: str, mapping: dict[str, str]) -> str:
    """Apply ``mapping`` to whole identifier tokens as one parallel substitution.

    String/char literals, comments, and include paths are never altered, and
    because every replacement is decided against the original token stream,
    swaps such as ``{a: b, b: a}`` are safe.
    """
    if not mapping:
        return source
    parts: list[str] = []
    prev = 0
    for tok in scan(source):
        if tok.kind == IDENT and tok.text in mapping:
            parts.append(source[prev:tok.start])
            parts.append(mapping[tok.text])
            prev = tok.end
    parts.append(source[prev:])
    return "".join(parts)
