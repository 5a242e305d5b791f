//! Blank-insensitive tokenization of fixed-form statements.
//!
//! Fortran-77 predates formal tokenization: blanks outside character literals
//! carry no meaning, so `INTEGEROOI(1)` means `INTEGER OOI(1)` and
//! `CALLOOOWIN(...)` means `CALL OOOWIN(...)`. Tokens therefore cannot be
//! split without knowing the statement's shape first. The lexer condenses
//! blanks, applies the assignment-shape test from [`crate::scan`] and a
//! longest-first keyword match at statement-head position, then tokenizes the
//! remainder as expression text.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::fixedform::LogicalStatement;
use crate::scan::{self, is_ident_char, is_ident_start, StatementShape};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    RealLiteral,
    StringLiteral,
    /// `.lt.` `.le.` `.gt.` `.ge.` `.eq.` `.ne.` `.and.` `.or.` `.not.`
    LogicalOp,
    /// `.true.` `.false.`
    RelKeywordConst,
    Punct,
    ArithOp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme.eq_ignore_ascii_case(lexeme)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexError {
    UnterminatedString { span: SourceSpan },
    IllegalCharacter { ch: char, span: SourceSpan },
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexError::UnterminatedString { span } => {
                write!(f, "{span}: unterminated character literal")
            }
            LexError::IllegalCharacter { ch, span } => {
                write!(f, "{span}: illegal character {ch:?}")
            }
        }
    }
}

impl core::error::Error for LexError {}

/// Statement keywords, tried longest-first at statement-head position.
/// `DOUBLEPRECISION` must come before `DO`, `ENDIF` before `END`.
const KEYWORDS: [&str; 27] = [
    "doubleprecision",
    "equivalence",
    "subroutine",
    "character",
    "dimension",
    "parameter",
    "continue",
    "function",
    "implicit",
    "integer",
    "logical",
    "program",
    "common",
    "elseif",
    "return",
    "endif",
    "write",
    "call",
    "else",
    "goto",
    "read",
    "real",
    "stop",
    "then",
    "end",
    "if",
    "do",
];

/// The condensed form of a statement: blanks outside character literals
/// removed, with a map back to char offsets in the original text.
struct Condensed {
    chars: Vec<char>,
    offsets: Vec<usize>,
}

fn condense(text: &str) -> Condensed {
    let raw: Vec<char> = text.chars().collect();
    let mask = scan::literal_mask(&raw);
    let mut chars = Vec::with_capacity(raw.len());
    let mut offsets = Vec::with_capacity(raw.len());
    for (i, &c) in raw.iter().enumerate() {
        if c == ' ' && !mask[i] {
            continue;
        }
        chars.push(c);
        offsets.push(i);
    }
    Condensed { chars, offsets }
}

struct Lexer<'a> {
    stmt: &'a LogicalStatement,
    condensed: Condensed,
    pos: usize,
    tokens: Vec<Token>,
}

/// Tokenize one logical statement under blank-insensitivity.
pub fn lex_statement(stmt: &LogicalStatement) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer { stmt, condensed: condense(&stmt.text), pos: 0, tokens: Vec::new() };
    lexer.statement_head()?;
    Ok(lexer.tokens)
}

impl Lexer<'_> {
    fn span_at(&self, start: usize, end: usize) -> SourceSpan {
        // `start..end` are condensed indices; map through to text offsets.
        let n = self.condensed.offsets.len();
        if n == 0 {
            return self.stmt.span;
        }
        let s = self.condensed.offsets[start.min(n - 1)];
        let e = self.condensed.offsets[end.saturating_sub(1).min(n - 1)];
        self.stmt.span_of(s, e + 1)
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize, lexeme: String) {
        let span = self.span_at(start, end);
        self.tokens.push(Token { kind, lexeme, span });
    }

    /// Lex from a statement-head position: resolve the assignment/DO/keyword
    /// ambiguity, emit the head tokens, then continue in expression mode.
    fn statement_head(&mut self) -> Result<(), LexError> {
        let rest = &self.condensed.chars[self.pos..];
        if rest.is_empty() {
            return Ok(());
        }
        match scan::statement_shape(rest) {
            StatementShape::DoLoop => return self.do_statement(),
            StatementShape::Assignment { .. } => return self.expression_rest(),
            StatementShape::Other => {}
        }
        if let Some(keyword) = self.match_keyword() {
            let start = self.pos;
            let end = start + keyword.len();
            let lexeme: String = self.condensed.chars[start..end].iter().collect();
            self.pos = end;
            self.push(TokenKind::Keyword, start, end, lexeme);
            if keyword == "if" || keyword == "elseif" {
                return self.if_statement();
            }
            return self.expression_rest();
        }
        self.expression_rest()
    }

    fn match_keyword(&self) -> Option<&'static str> {
        let rest = &self.condensed.chars[self.pos..];
        KEYWORDS.iter().copied().find(|kw| {
            kw.len() <= rest.len()
                && kw.chars().zip(rest.iter()).all(|(k, c)| c.eq_ignore_ascii_case(&k))
        })
    }

    /// `DO label? var = e1, e2 [, e3]` — the shape test has already proven
    /// this form, so the label can be split off confidently.
    fn do_statement(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 2;
        self.push(TokenKind::Keyword, start, start + 2, self.slice(start, start + 2));
        let digits_start = self.pos;
        while self.pos < self.condensed.chars.len()
            && self.condensed.chars[self.pos].is_ascii_digit()
        {
            self.pos += 1;
        }
        if self.pos > digits_start {
            self.push(
                TokenKind::IntLiteral,
                digits_start,
                self.pos,
                self.slice(digits_start, self.pos),
            );
        }
        self.expression_rest()
    }

    /// `IF ( cond ) tail` / `ELSEIF ( cond ) THEN`; the tail is itself a
    /// statement-head position (`IF (X) GOTO 10` must split `GOTO10`).
    fn if_statement(&mut self) -> Result<(), LexError> {
        if self.peek() != Some('(') {
            return self.expression_rest();
        }
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Some('(') => {
                    depth += 1;
                    self.lex_one()?;
                }
                Some(')') => {
                    depth -= 1;
                    self.lex_one()?;
                    if depth == 0 {
                        break;
                    }
                }
                Some(_) => self.lex_one()?,
                None => return Ok(()),
            }
        }
        self.statement_head()
    }

    fn slice(&self, start: usize, end: usize) -> String {
        self.condensed.chars[start..end].iter().collect()
    }

    fn peek(&self) -> Option<char> {
        self.condensed.chars.get(self.pos).copied()
    }

    fn expression_rest(&mut self) -> Result<(), LexError> {
        while self.pos < self.condensed.chars.len() {
            self.lex_one()?;
        }
        Ok(())
    }

    /// Lex one expression-mode token at the current position.
    fn lex_one(&mut self) -> Result<(), LexError> {
        let chars = &self.condensed.chars;
        let i = self.pos;
        let c = chars[i];

        if c == '\'' {
            return self.string_literal();
        }
        if c.is_ascii_digit() {
            return self.number();
        }
        if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let lexeme = self.slice(i, j);
            self.pos = j;
            self.push(TokenKind::Identifier, i, j, lexeme);
            return Ok(());
        }
        if c == '.' {
            return self.dot();
        }
        if c == '*' || c == '/' {
            // `**` and `//` are single tokens.
            let j = if chars.get(i + 1) == Some(&c) { i + 2 } else { i + 1 };
            let lexeme = self.slice(i, j);
            self.pos = j;
            self.push(TokenKind::ArithOp, i, j, lexeme);
            return Ok(());
        }
        if c == '+' || c == '-' {
            self.pos = i + 1;
            self.push(TokenKind::ArithOp, i, i + 1, c.to_string());
            return Ok(());
        }
        if matches!(c, '(' | ')' | ',' | '=' | ':') {
            self.pos = i + 1;
            self.push(TokenKind::Punct, i, i + 1, c.to_string());
            return Ok(());
        }
        Err(LexError::IllegalCharacter { ch: c, span: self.span_at(i, i + 1) })
    }

    fn string_literal(&mut self) -> Result<(), LexError> {
        let chars = &self.condensed.chars;
        let start = self.pos;
        let mut j = start + 1;
        loop {
            match chars.get(j) {
                Some('\'') => {
                    if chars.get(j + 1) == Some(&'\'') {
                        j += 2; // doubled quote inside the literal
                    } else {
                        j += 1;
                        break;
                    }
                }
                Some(_) => j += 1,
                None => {
                    return Err(LexError::UnterminatedString {
                        span: self.span_at(start, chars.len().max(start + 1)),
                    })
                }
            }
        }
        let lexeme = self.slice(start, j);
        self.pos = j;
        self.push(TokenKind::StringLiteral, start, j, lexeme);
        Ok(())
    }

    /// Number starting with a digit: integer, or real when a fraction dot or
    /// an exponent follows. A dot joins the literal only when the char after
    /// it is not a letter (`1.5`, `1.`, but `1.LT.5` keeps the dot for the
    /// operator scan).
    fn number(&mut self) -> Result<(), LexError> {
        let chars = &self.condensed.chars;
        let start = self.pos;
        let mut j = start;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        let mut real = false;
        if chars.get(j) == Some(&'.') {
            let after = chars.get(j + 1).copied();
            let letter_after = after.map(|c| c.is_ascii_alphabetic()).unwrap_or(false);
            if !letter_after {
                real = true;
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
        }
        if let Some(exp_len) = exponent_len(&chars[j..]) {
            real = true;
            j += exp_len;
        }
        let kind = if real { TokenKind::RealLiteral } else { TokenKind::IntLiteral };
        let lexeme = self.slice(start, j);
        self.pos = j;
        self.push(kind, start, j, lexeme);
        Ok(())
    }

    /// A dot: logical operator, logical constant, a real literal like `.5`,
    /// or a stray punct the parser will reject.
    fn dot(&mut self) -> Result<(), LexError> {
        let chars = &self.condensed.chars;
        let start = self.pos;

        let mut j = start + 1;
        while j < chars.len() && chars[j].is_ascii_alphabetic() {
            j += 1;
        }
        if j > start + 1 && chars.get(j) == Some(&'.') {
            let word: String =
                chars[start + 1..j].iter().map(|c| c.to_ascii_lowercase()).collect();
            if scan::is_dot_keyword(&word) {
                let kind = if word == "true" || word == "false" {
                    TokenKind::RelKeywordConst
                } else {
                    TokenKind::LogicalOp
                };
                let lexeme = alloc::format!(".{word}.");
                self.pos = j + 1;
                self.push(kind, start, j + 1, lexeme);
                return Ok(());
            }
        }

        // `.5`-style real literal: digit on the right, and the char on the
        // left (if any) is not an identifier character.
        let digit_right = chars.get(start + 1).map(|c| c.is_ascii_digit()).unwrap_or(false);
        let ident_left = start > 0 && is_ident_char(chars[start - 1]);
        if digit_right && !ident_left {
            let mut j = start + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if let Some(exp_len) = exponent_len(&chars[j..]) {
                j += exp_len;
            }
            let lexeme = self.slice(start, j);
            self.pos = j;
            self.push(TokenKind::RealLiteral, start, j, lexeme);
            return Ok(());
        }

        self.pos = start + 1;
        self.push(TokenKind::Punct, start, start + 1, ".".to_string());
        Ok(())
    }
}

/// Length of an exponent part (`E3`, `e+10`, `D-2`) at the head of `rest`.
fn exponent_len(rest: &[char]) -> Option<usize> {
    let first = rest.first()?;
    if !matches!(first.to_ascii_lowercase(), 'e' | 'd') {
        return None;
    }
    let mut k = 1;
    if matches!(rest.get(k), Some('+') | Some('-')) {
        k += 1;
    }
    let digits_start = k;
    while rest.get(k).map(|c| c.is_ascii_digit()).unwrap_or(false) {
        k += 1;
    }
    (k > digits_start).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedform::{assemble, classify_source, SourceUnit};
    use crate::span::FileId;

    fn statement(src: &str) -> LogicalStatement {
        let (lines, _) = classify_source(FileId(0), src);
        let units = assemble(&lines).unwrap();
        match units.into_iter().next().unwrap() {
            SourceUnit::Statement(s) => s,
            other => panic!("expected statement, got {other:?}"),
        }
    }

    fn lex(text: &str) -> Vec<Token> {
        let mut src = String::from("      ");
        src.push_str(text);
        src.push('\n');
        lex_statement(&statement(&src)).unwrap()
    }

    fn kinds_and_lexemes(tokens: &[Token]) -> Vec<(TokenKind, String)> {
        tokens.iter().map(|t| (t.kind, t.lexeme.clone())).collect()
    }

    #[test]
    fn glued_type_declaration_splits() {
        let tokens = lex("INTEGEROOI(1)");
        assert_eq!(
            kinds_and_lexemes(&tokens),
            alloc::vec![
                (TokenKind::Keyword, "INTEGER".to_string()),
                (TokenKind::Identifier, "OOI".to_string()),
                (TokenKind::Punct, "(".to_string()),
                (TokenKind::IntLiteral, "1".to_string()),
                (TokenKind::Punct, ")".to_string()),
            ]
        );
    }

    #[test]
    fn glued_call_splits() {
        let tokens = lex("CALLOOOWIN(OO4,0,'NEWUSE 10 UR ',OO1,13+UBBCNT)");
        assert_eq!(tokens[0].kind, TokenKind::Keyword);
        assert_eq!(tokens[0].lexeme, "CALL");
        assert_eq!(tokens[1].kind, TokenKind::Identifier);
        assert_eq!(tokens[1].lexeme, "OOOWIN");
        assert!(tokens
            .iter()
            .any(|t| t.kind == TokenKind::StringLiteral && t.lexeme == "'NEWUSE 10 UR '"));
    }

    #[test]
    fn blanks_are_insignificant() {
        let spaced = lex("( a .lt. 5 )");
        let packed = lex("(a.lt.5)");
        assert_eq!(kinds_and_lexemes(&spaced), kinds_and_lexemes(&packed));
        assert_eq!(
            kinds_and_lexemes(&packed),
            alloc::vec![
                (TokenKind::Punct, "(".to_string()),
                (TokenKind::Identifier, "a".to_string()),
                (TokenKind::LogicalOp, ".lt.".to_string()),
                (TokenKind::IntLiteral, "5".to_string()),
                (TokenKind::Punct, ")".to_string()),
            ]
        );
    }

    #[test]
    fn plain_assignment() {
        assert_eq!(
            kinds_and_lexemes(&lex("UR = OO1")),
            alloc::vec![
                (TokenKind::Identifier, "UR".to_string()),
                (TokenKind::Punct, "=".to_string()),
                (TokenKind::Identifier, "OO1".to_string()),
            ]
        );
    }

    #[test]
    fn assignment_beats_keyword_prefix() {
        let tokens = lex("INTEGERX = 5");
        assert_eq!(tokens[0].kind, TokenKind::Identifier);
        assert_eq!(tokens[0].lexeme, "INTEGERX");
    }

    #[test]
    fn do_loop_vs_do_identifier() {
        let loop_tokens = lex("DO 10 I = 1, 5");
        assert_eq!(loop_tokens[0].kind, TokenKind::Keyword);
        assert_eq!(loop_tokens[0].lexeme, "DO");
        assert_eq!(loop_tokens[1].kind, TokenKind::IntLiteral);
        assert_eq!(loop_tokens[1].lexeme, "10");

        let assign_tokens = lex("DO10I=15");
        assert_eq!(assign_tokens[0].kind, TokenKind::Identifier);
        assert_eq!(assign_tokens[0].lexeme, "DO10I");
    }

    #[test]
    fn logical_if_tail_is_statement_position() {
        let tokens = lex("IF(A.EQ.B)GOTO10");
        let kinds = kinds_and_lexemes(&tokens);
        assert_eq!(kinds[0], (TokenKind::Keyword, "IF".to_string()));
        assert!(kinds.contains(&(TokenKind::Keyword, "GOTO".to_string())));
        assert_eq!(kinds.last().unwrap(), &(TokenKind::IntLiteral, "10".to_string()));
    }

    #[test]
    fn real_literals() {
        assert_eq!(lex("X = 1.5")[2].kind, TokenKind::RealLiteral);
        assert_eq!(lex("X = 1.")[2].kind, TokenKind::RealLiteral);
        assert_eq!(lex("X = .5")[2].kind, TokenKind::RealLiteral);
        assert_eq!(lex("X = 1.5E3")[2].lexeme, "1.5E3");
        assert_eq!(lex("X = 2E-4")[2].kind, TokenKind::RealLiteral);
    }

    #[test]
    fn literal_dot_operator_ambiguity() {
        // `1.LT.5` is a comparison, not a real literal.
        let tokens = lex("L = 1.LT.5");
        let kinds = kinds_and_lexemes(&tokens);
        assert_eq!(kinds[2], (TokenKind::IntLiteral, "1".to_string()));
        assert_eq!(kinds[3], (TokenKind::LogicalOp, ".lt.".to_string()));
        assert_eq!(kinds[4], (TokenKind::IntLiteral, "5".to_string()));
    }

    #[test]
    fn logical_constants() {
        let tokens = lex("FOUND = .TRUE.");
        assert_eq!(tokens[2].kind, TokenKind::RelKeywordConst);
        assert_eq!(tokens[2].lexeme, ".true.");
    }

    #[test]
    fn doubled_quotes_stay_in_literal() {
        let tokens = lex("M = 'DON''T'");
        assert_eq!(tokens[2].kind, TokenKind::StringLiteral);
        assert_eq!(tokens[2].lexeme, "'DON''T'");
    }

    #[test]
    fn unterminated_string_is_an_error() {
        let stmt = statement("      M = 'OOPS\n");
        assert!(matches!(lex_statement(&stmt), Err(LexError::UnterminatedString { .. })));
    }

    #[test]
    fn illegal_character_reports_span() {
        let stmt = statement("      X = A # B\n");
        match lex_statement(&stmt) {
            Err(LexError::IllegalCharacter { ch, .. }) => assert_eq!(ch, '#'),
            other => panic!("expected illegal character, got {other:?}"),
        }
    }

    #[test]
    fn token_spans_point_into_source() {
        let tokens = lex("UR = OO1");
        // `UR` occupies columns 7-8 of line 1.
        assert_eq!(tokens[0].span.start_col, 7);
        assert_eq!(tokens[0].span.end_col, 8);
        assert_eq!(tokens[2].span.start_col, 12);
    }

    #[test]
    fn glued_tokens_across_continuations() {
        let tokens = lex_statement(&statement("      INTE\n     &GER X\n")).unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Keyword);
        assert_eq!(tokens[0].lexeme, "INTEGER");
        assert_eq!(tokens[0].span.start_line, 1);
        assert_eq!(tokens[0].span.end_line, 2);
    }
}
