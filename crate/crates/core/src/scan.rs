//! Small character-level helpers shared by the rewriter and the lexer:
//! identifier classes, character-literal tracking, and the fixed-form
//! assignment-shape test that resolves the classic keyword ambiguities.

use alloc::vec::Vec;

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

/// The eleven dot-delimited keywords of Fortran-77 (`.LT.` family plus the
/// logical constants). A dot flanked by one of these is never Esope notation.
pub const DOT_KEYWORDS: [&str; 11] =
    ["lt", "le", "gt", "ge", "eq", "ne", "and", "or", "not", "true", "false"];

pub fn is_dot_keyword(word: &str) -> bool {
    DOT_KEYWORDS.iter().any(|k| word.eq_ignore_ascii_case(k))
}

/// `mask[i]` is true when `chars[i]` lies inside a character literal; the
/// delimiting quotes themselves count as inside. A doubled `''` reads as two
/// quote characters, which this state machine handles for free (the literal
/// closes and immediately reopens).
pub fn literal_mask(chars: &[char]) -> Vec<bool> {
    let mut mask = Vec::with_capacity(chars.len());
    let mut open = false;
    for &c in chars {
        if c == '\'' {
            mask.push(true);
            open = !open;
        } else {
            mask.push(open);
        }
    }
    mask
}

/// Outcome of the assignment-shape test on blank-condensed statement text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatementShape {
    /// `identifier (group)* = ...` with `=` at depth 0 and no depth-0 comma
    /// before it, and no depth-0 comma after it.
    Assignment {
        /// Char index of the `=` in the condensed text.
        eq: usize,
    },
    /// Same head shape but with a depth-0 comma after the `=` and a
    /// `DO [label] var` prefix: an indexed DO statement.
    DoLoop,
    /// Anything else: keyword dispatch applies.
    Other,
}

/// Classify blank-condensed statement text. This is the fixed-form
/// disambiguator: `DO10I=1,5` is a DO loop, `DO10I=15` assigns to `DO10I`,
/// `REALX=1` assigns to `REALX` while `REALX(3)` declares an array.
pub fn statement_shape(condensed: &[char]) -> StatementShape {
    let mask = literal_mask(condensed);
    let n = condensed.len();
    if n == 0 || !is_ident_start(condensed[0]) {
        return StatementShape::Other;
    }
    let mut i = 0;
    while i < n && is_ident_char(condensed[i]) {
        i += 1;
    }
    let ident_end = i;
    let mut groups = 0usize;
    while i < n && condensed[i] == '(' && !mask[i] {
        let mut depth = 0usize;
        while i < n {
            if mask[i] {
                i += 1;
                continue;
            }
            match condensed[i] {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        i += 1;
                        break;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        if depth_unclosed(condensed, &mask, ident_end) {
            return StatementShape::Other;
        }
        groups += 1;
    }
    if i >= n || condensed[i] != '=' || mask[i] {
        return StatementShape::Other;
    }
    let eq = i;
    let mut depth = 0usize;
    let mut comma_after = false;
    for j in eq + 1..n {
        if mask[j] {
            continue;
        }
        match condensed[j] {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => comma_after = true,
            _ => {}
        }
    }
    if comma_after {
        if groups == 0 && looks_like_do_head(&condensed[..eq]) {
            return StatementShape::DoLoop;
        }
        // `A = 1, 2` is not a statement at all; let the parser reject it.
        return StatementShape::Assignment { eq };
    }
    StatementShape::Assignment { eq }
}

fn depth_unclosed(condensed: &[char], mask: &[bool], from: usize) -> bool {
    let mut depth = 0isize;
    for i in from..condensed.len() {
        if mask[i] {
            continue;
        }
        match condensed[i] {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
    }
    depth != 0
}

/// `do`, optional digits (the loop label), then an identifier.
fn looks_like_do_head(head: &[char]) -> bool {
    if head.len() < 3 {
        return false;
    }
    if !head[0].eq_ignore_ascii_case(&'d') || !head[1].eq_ignore_ascii_case(&'o') {
        return false;
    }
    let mut i = 2;
    while i < head.len() && head[i].is_ascii_digit() {
        i += 1;
    }
    i < head.len() && is_ident_start(head[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn shape(s: &str) -> StatementShape {
        let condensed: Vec<char> = s.chars().filter(|c| *c != ' ').collect();
        statement_shape(&condensed)
    }

    #[test]
    fn do_loop_vs_assignment() {
        assert_eq!(shape("DO 10 I = 1, 5"), StatementShape::DoLoop);
        assert_eq!(shape("DO10I=15"), StatementShape::Assignment { eq: 5 });
        assert_eq!(shape("DOG = 1"), StatementShape::Assignment { eq: 3 });
    }

    #[test]
    fn keyword_statements_are_other() {
        assert_eq!(shape("CALL FOO(X)"), StatementShape::Other);
        assert_eq!(shape("PARAMETER (MX = 60)"), StatementShape::Other);
        assert_eq!(shape("IF (A .EQ. B) X = 1"), StatementShape::Other);
    }

    #[test]
    fn array_assignment_and_substring_heads() {
        assert!(matches!(shape("REALX(3) = 5"), StatementShape::Assignment { .. }));
        assert!(matches!(shape("OO_004(A)(B:C) = NAME"), StatementShape::Assignment { .. }));
        assert_eq!(shape("REALX(3)"), StatementShape::Other);
    }

    #[test]
    fn literal_mask_tracks_doubled_quotes() {
        let chars: Vec<char> = "A = 'don''t' + B".chars().collect();
        let mask = literal_mask(&chars);
        assert!(!mask[0]);
        assert!(mask[5]); // inside literal
        assert!(!mask[chars.len() - 1]);
    }
}
