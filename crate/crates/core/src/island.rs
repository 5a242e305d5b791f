//! The island-grammar rewriting pass.
//!
//! Esope constructs are "islands" inside otherwise plain Fortran-77 "water".
//! This pass recognizes them and rewrites the source into syntactically valid
//! annotated Fortran:
//!
//! * `SEGMENT, name` / `END SEGMENT` / `POINTEUR v.Seg` and the six segment
//!   statements (`segini`, `segact`, `segadj`, `segdes`, `segprt`, `segsup`)
//!   become comment lines carrying the marker `c@_` in columns 1-3 followed
//!   by the lowercased original statement text;
//! * dot notation `p.attr` becomes the call form `D__(p,attr)`;
//! * slash notation `access(/n)` becomes `S__(access,n)`.
//!
//! Everything else passes through byte-identical, and every rewrite is logged
//! so later stages can be cross-checked against this pass.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::diag::Warning;
use crate::fixedform::{
    assemble, classify_line, classify_source, render_statement, AssembleError, LineKind,
    LogicalStatement, SourceUnit,
};
use crate::scan::{is_dot_keyword, is_ident_char, is_ident_start, literal_mask};
use crate::span::{FileId, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewriteRule {
    SegBegin,
    SegEnd,
    PointerDecl,
    SegStatement,
    DotNotation,
    SlashNotation,
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RewriteRule::SegBegin => "seg_begin",
            RewriteRule::SegEnd => "seg_end",
            RewriteRule::PointerDecl => "pointer_decl",
            RewriteRule::SegStatement => "seg_statement",
            RewriteRule::DotNotation => "dot_notation",
            RewriteRule::SlashNotation => "slash_notation",
        };
        f.write_str(name)
    }
}

/// One applied rewrite. `flagged` marks shapes worth human review: chained
/// dot access, dot access on a parenthesized primary, and subscripted
/// attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRecord {
    pub rule: RewriteRule,
    pub span: SourceSpan,
    pub original: String,
    pub replacement: String,
    pub flagged: bool,
}

/// Audit trail of every rewrite applied to one file, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewriteLog {
    pub file: FileId,
    pub records: Vec<RewriteRecord>,
}

/// Construct totals in the order conventionally reported for Esope sources.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConstructCounts {
    pub segments: usize,
    pub pointers: usize,
    pub instructions: usize,
    pub dots: usize,
    pub slashes: usize,
}

impl RewriteLog {
    pub fn counts(&self) -> ConstructCounts {
        let mut counts = ConstructCounts::default();
        for record in &self.records {
            match record.rule {
                RewriteRule::SegBegin => counts.segments += 1,
                RewriteRule::SegEnd => {}
                RewriteRule::PointerDecl => counts.pointers += 1,
                RewriteRule::SegStatement => counts.instructions += 1,
                RewriteRule::DotNotation => counts.dots += 1,
                RewriteRule::SlashNotation => counts.slashes += 1,
            }
        }
        counts
    }
}

/// The three marker strings that must not already appear in a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Annotation,
    DotForm,
    SlashForm,
}

impl Marker {
    pub fn as_str(self) -> &'static str {
        match self {
            Marker::Annotation => "c@_",
            Marker::DotForm => "D__(",
            Marker::SlashForm => "S__(",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerCollision {
    pub span: SourceSpan,
    pub marker: Marker,
}

/// Scan raw source for occurrences of the rewrite markers, case-insensitive.
/// An empty result means [`de_esopify`] may proceed safely.
pub fn scan_markers(file: FileId, source: &str) -> Vec<MarkerCollision> {
    let mut collisions = Vec::new();
    for (idx, line) in source.split('\n').enumerate() {
        let lower: Vec<char> = line.chars().map(|c| c.to_ascii_lowercase()).collect();
        for marker in [Marker::Annotation, Marker::DotForm, Marker::SlashForm] {
            let needle: Vec<char> =
                marker.as_str().chars().map(|c| c.to_ascii_lowercase()).collect();
            if lower.len() < needle.len() {
                continue;
            }
            for start in 0..=lower.len() - needle.len() {
                if lower[start..start + needle.len()] == needle[..] {
                    collisions.push(MarkerCollision {
                        span: SourceSpan::new(
                            FileId(file.0),
                            (idx + 1) as u32,
                            (start + 1) as u32,
                            (idx + 1) as u32,
                            (start + needle.len()) as u32,
                        ),
                        marker,
                    });
                }
            }
        }
    }
    collisions.sort_by_key(|c| (c.span.start_line, c.span.start_col));
    collisions
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IslandError {
    Assemble(AssembleError),
    /// `SEGMENT` with no matching `END SEGMENT` before the end of the
    /// enclosing program unit.
    UnterminatedSegment { span: SourceSpan },
    /// A `POINTEUR` line that does not match the `word.word[, word.word]`
    /// grammar.
    MalformedPointerDecl { span: SourceSpan, text: String },
}

impl fmt::Display for IslandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IslandError::Assemble(e) => write!(f, "{e}"),
            IslandError::UnterminatedSegment { span } => {
                write!(f, "{span}: SEGMENT without matching END SEGMENT")
            }
            IslandError::MalformedPointerDecl { span, text } => {
                write!(f, "{span}: malformed POINTEUR declaration: {text}")
            }
        }
    }
}

impl core::error::Error for IslandError {}

impl From<AssembleError> for IslandError {
    fn from(e: AssembleError) -> Self {
        IslandError::Assemble(e)
    }
}

#[derive(Debug, Clone)]
pub struct DeEsopified {
    pub annotated: String,
    pub log: RewriteLog,
    pub warnings: Vec<Warning>,
}

enum EsopeHead {
    SegBegin,
    SegEnd,
    Pointer,
    Instruction,
    UnitEnd,
    Water,
}

/// Rewrite Esope constructs into annotated Fortran-77.
///
/// Callers should run [`scan_markers`] first; if markers are already present
/// this proceeds anyway and records a warning per collision.
pub fn de_esopify(file: FileId, source: &str) -> Result<DeEsopified, IslandError> {
    let mut warnings = Vec::new();
    for collision in scan_markers(file, source) {
        warnings.push(Warning::new(
            alloc::format!(
                "marker '{}' already present in source; rewrite output may be ambiguous",
                collision.marker.as_str()
            ),
            Some(collision.span),
        ));
    }

    let (lines, classify_warnings) = classify_source(file, source);
    warnings.extend(classify_warnings);
    let units = assemble(&lines)?;

    // Output lines tagged with their original line number so source order is
    // restored even though assembly moves interleaved comments around.
    let mut out: Vec<(u32, String)> = Vec::new();
    let mut records: Vec<RewriteRecord> = Vec::new();
    let mut seg_stack: Vec<SourceSpan> = Vec::new();

    for unit in &units {
        match unit {
            SourceUnit::Comment(c) => {
                let mut raw = String::new();
                raw.push(c.marker);
                raw.push_str(&c.text);
                out.push((c.line_no, raw));
            }
            SourceUnit::Blank(b) => out.push((b.line_no, b.raw_text.clone())),
            SourceUnit::Include(inc) => out.push((inc.line_no, inc.raw_text.clone())),
            SourceUnit::Statement(stmt) => {
                let head = esope_head(&stmt.text);
                match head {
                    EsopeHead::Pointer => {
                        validate_pointer_bindings(stmt)?;
                        annotate(stmt, RewriteRule::PointerDecl, &mut out, &mut records, &mut warnings);
                    }
                    EsopeHead::SegBegin => {
                        seg_stack.push(stmt.span);
                        annotate(stmt, RewriteRule::SegBegin, &mut out, &mut records, &mut warnings);
                    }
                    EsopeHead::SegEnd => {
                        if seg_stack.pop().is_none() {
                            warnings.push(Warning::new(
                                "END SEGMENT without open SEGMENT".to_string(),
                                Some(stmt.span),
                            ));
                        }
                        annotate(stmt, RewriteRule::SegEnd, &mut out, &mut records, &mut warnings);
                    }
                    EsopeHead::Instruction => {
                        annotate(stmt, RewriteRule::SegStatement, &mut out, &mut records, &mut warnings);
                    }
                    EsopeHead::UnitEnd | EsopeHead::Water => {
                        if matches!(head, EsopeHead::UnitEnd) {
                            if let Some(open) = seg_stack.pop() {
                                return Err(IslandError::UnterminatedSegment { span: open });
                            }
                        }
                        rewrite_water(stmt, &lines, &mut out, &mut records, &mut warnings);
                    }
                }
            }
        }
    }
    if let Some(open) = seg_stack.pop() {
        return Err(IslandError::UnterminatedSegment { span: open });
    }

    out.sort_by_key(|(line_no, _)| *line_no);
    let mut annotated = String::new();
    for (i, (_, line)) in out.iter().enumerate() {
        if i > 0 {
            annotated.push('\n');
        }
        annotated.push_str(line);
    }
    if source.ends_with('\n') && !annotated.is_empty() {
        annotated.push('\n');
    }

    records.sort_by_key(|r| (r.span.start_line, r.span.start_col));
    Ok(DeEsopified { annotated, log: RewriteLog { file, records }, warnings })
}

/// Spans of statement lines still longer than 72 characters. [`de_esopify`]
/// re-wraps rewritten statements, so its output should yield an empty list.
pub fn check_line_lengths(file: FileId, annotated: &str) -> Vec<SourceSpan> {
    let mut spans = Vec::new();
    if annotated.is_empty() {
        return spans;
    }
    let body = annotated.strip_suffix('\n').unwrap_or(annotated);
    for (idx, raw) in body.split('\n').enumerate() {
        let (line, _) = classify_line(file, (idx + 1) as u32, raw);
        if matches!(line.kind, LineKind::Initial | LineKind::Continuation) {
            let len = raw.chars().count();
            if len > crate::fixedform::LINE_WIDTH {
                spans.push(SourceSpan::new(
                    file,
                    line.line_no,
                    (crate::fixedform::LINE_WIDTH + 1) as u32,
                    line.line_no,
                    len as u32,
                ));
            }
        }
    }
    spans
}

fn first_word(text: &str) -> (String, usize) {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() && chars[i] == ' ' {
        i += 1;
    }
    let start = i;
    while i < chars.len() && is_ident_char(chars[i]) {
        i += 1;
    }
    (chars[start..i].iter().collect::<String>().to_ascii_lowercase(), i)
}

const INSTRUCTION_KEYWORDS: [&str; 6] = ["segini", "segact", "segadj", "segdes", "segprt", "segsup"];

fn esope_head(text: &str) -> EsopeHead {
    let condensed: Vec<char> = text.chars().filter(|c| *c != ' ').collect();
    // Keyword lookalikes in assignment position stay water: `SEGINI = 3`
    // assigns to a variable named SEGINI.
    match crate::scan::statement_shape(&condensed) {
        crate::scan::StatementShape::Assignment { .. } | crate::scan::StatementShape::DoLoop => {
            return EsopeHead::Water
        }
        crate::scan::StatementShape::Other => {}
    }
    let stripped: String = condensed.iter().map(|c| c.to_ascii_lowercase()).collect();
    if stripped == "end" {
        return EsopeHead::UnitEnd;
    }
    if stripped == "endsegment" {
        return EsopeHead::SegEnd;
    }
    let (word, _) = first_word(text);
    match word.as_str() {
        "segment" => EsopeHead::SegBegin,
        "pointeur" => EsopeHead::Pointer,
        w if INSTRUCTION_KEYWORDS.contains(&w) => EsopeHead::Instruction,
        _ => EsopeHead::Water,
    }
}

fn validate_pointer_bindings(stmt: &LogicalStatement) -> Result<(), IslandError> {
    let chars: Vec<char> = stmt.text.chars().collect();
    let (_, mut i) = first_word(&stmt.text);
    let err = || IslandError::MalformedPointerDecl { span: stmt.span, text: stmt.text.clone() };
    loop {
        // word '.' word
        while i < chars.len() && chars[i] == ' ' {
            i += 1;
        }
        for part in 0..2 {
            if i >= chars.len() || !is_ident_start(chars[i]) {
                return Err(err());
            }
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            while i < chars.len() && chars[i] == ' ' {
                i += 1;
            }
            if part == 0 {
                if i >= chars.len() || chars[i] != '.' {
                    return Err(err());
                }
                i += 1;
                while i < chars.len() && chars[i] == ' ' {
                    i += 1;
                }
            }
        }
        if i >= chars.len() {
            return Ok(());
        }
        if chars[i] != ',' {
            return Err(err());
        }
        i += 1;
    }
}

/// Replace an Esope statement by `c@_` comment lines, one per original
/// physical line; continuation pieces carry `&` as the first payload char so
/// recovery can rejoin them.
fn annotate(
    stmt: &LogicalStatement,
    rule: RewriteRule,
    out: &mut Vec<(u32, String)>,
    records: &mut Vec<RewriteRecord>,
    warnings: &mut Vec<Warning>,
) {
    if stmt.label.is_some() {
        warnings.push(Warning::new(
            "label on an Esope statement is dropped by annotation".to_string(),
            Some(stmt.span),
        ));
    }
    let chars: Vec<char> = stmt.text.chars().collect();
    let mut replacement = String::new();
    for (k, piece) in stmt.pieces.iter().enumerate() {
        let piece_text: String = chars[piece.text_offset..piece.text_offset + piece.len]
            .iter()
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let line = if k == 0 {
            alloc::format!("c@_  {piece_text}")
        } else {
            alloc::format!("c@_ &{piece_text}")
        };
        if k > 0 {
            replacement.push('\n');
        }
        replacement.push_str(&line);
        out.push((piece.line_no, line));
    }
    records.push(RewriteRecord {
        rule,
        span: stmt.span,
        original: stmt.text.clone(),
        replacement,
        flagged: false,
    });
}

fn rewrite_water(
    stmt: &LogicalStatement,
    lines: &[crate::fixedform::PhysicalLine],
    out: &mut Vec<(u32, String)>,
    records: &mut Vec<RewriteRecord>,
    warnings: &mut Vec<Warning>,
) {
    let chars: Vec<char> = stmt.text.chars().collect();
    let mut rewriter = WaterRewriter { stmt, records, warnings };
    let mut rewritten = String::new();
    rewriter.rewrite(&chars, 0, &mut rewritten);

    if rewritten == stmt.text {
        // Untouched water passes through byte-identical, original layout
        // included.
        for piece in &stmt.pieces {
            let raw = lines
                .iter()
                .find(|l| l.line_no == piece.line_no)
                .map(|l| l.raw_text.clone())
                .unwrap_or_default();
            out.push((piece.line_no, raw));
        }
        return;
    }

    let first_line = stmt.pieces.first().map(|p| p.line_no).unwrap_or(stmt.span.start_line);
    match render_statement(&rewritten, stmt.label) {
        Ok(rendered) => {
            for line in rendered {
                out.push((first_line, line));
            }
        }
        Err(_) => {
            // A literal too long for one statement field; emit overlong and
            // let check_line_lengths flag it.
            warnings.push(Warning::new(
                "rewritten statement cannot be wrapped at column 72".to_string(),
                Some(stmt.span),
            ));
            let mut line = String::from("      ");
            line.push_str(&rewritten);
            out.push((first_line, line));
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Last {
    IdentRun,
    GroupClose,
    Other,
}

struct WaterRewriter<'a> {
    stmt: &'a LogicalStatement,
    records: &'a mut Vec<RewriteRecord>,
    warnings: &'a mut Vec<Warning>,
}

impl WaterRewriter<'_> {
    /// Rewrite dot and slash notation in `chars` (a slice of the statement
    /// text starting at text offset `base`), appending to `out`.
    fn rewrite(&mut self, chars: &[char], base: usize, out: &mut String) {
        let mask = literal_mask(chars);
        let n = chars.len();
        let mut i = 0;
        // Start of the current primary suffix, as (byte pos in out, char
        // index in chars). A "primary" is an identifier possibly extended by
        // attached paren groups and previous dot rewrites.
        let mut mark: Option<(usize, usize)> = None;
        let mut last = Last::Other;

        while i < n {
            let c = chars[i];
            if mask[i] {
                out.push(c);
                mark = None;
                last = Last::Other;
                i += 1;
                continue;
            }
            if is_ident_char(c) {
                if last != Last::IdentRun {
                    mark = Some((out.len(), i));
                }
                out.push(c);
                last = Last::IdentRun;
                i += 1;
                continue;
            }
            if c == '.' {
                if let Some(consumed) = self.try_dot(chars, &mask, base, i, &mut mark, last, out) {
                    i = consumed;
                    last = Last::GroupClose;
                    continue;
                }
                out.push(c);
                mark = None;
                last = Last::Other;
                i += 1;
                continue;
            }
            if c == '(' {
                let attached = mark.is_some() && matches!(last, Last::IdentRun | Last::GroupClose);
                if attached {
                    if let Some(consumed) = self.try_slash(chars, &mask, base, i, &mut mark, out) {
                        i = consumed;
                        last = Last::GroupClose;
                        continue;
                    }
                }
                let close = match matching_paren(chars, &mask, i) {
                    Some(close) => close,
                    None => {
                        // Unbalanced; copy the rest verbatim.
                        for &c in &chars[i..] {
                            out.push(c);
                        }
                        return;
                    }
                };
                out.push('(');
                self.rewrite(&chars[i + 1..close], base + i + 1, out);
                out.push(')');
                if attached {
                    last = Last::GroupClose;
                } else {
                    mark = None;
                    last = Last::Other;
                }
                i = close + 1;
                continue;
            }
            out.push(c);
            mark = None;
            last = Last::Other;
            i += 1;
        }
    }

    /// Attempt a dot-notation rewrite at `chars[i] == '.'`. Returns the char
    /// index after the consumed attribute on success.
    #[allow(clippy::too_many_arguments)]
    fn try_dot(
        &mut self,
        chars: &[char],
        mask: &[bool],
        base: usize,
        i: usize,
        mark: &mut Option<(usize, usize)>,
        last: Last,
        out: &mut String,
    ) -> Option<usize> {
        let (mark_out, mark_orig) = (*mark)?;
        if i == 0 || i + 1 >= chars.len() {
            return None;
        }
        let left_char = chars[i - 1];
        let left_is_ident = is_ident_char(left_char) && !mask[i - 1];
        let left_is_group = left_char == ')' && last == Last::GroupClose;
        if !left_is_ident && !left_is_group {
            return None;
        }
        if left_is_ident {
            let mut lw = i;
            while lw > 0 && is_ident_char(chars[lw - 1]) {
                lw -= 1;
            }
            let left_word: String = chars[lw..i].iter().collect();
            if !left_word.chars().next().map(is_ident_start).unwrap_or(false)
                || is_dot_keyword(&left_word)
            {
                return None;
            }
        }
        if !is_ident_char(chars[i + 1]) || mask[i + 1] {
            return None;
        }
        let mut rw = i + 1;
        while rw < chars.len() && is_ident_char(chars[rw]) {
            rw += 1;
        }
        let right_word: String = chars[i + 1..rw].iter().collect();
        if !right_word.chars().next().map(is_ident_start).unwrap_or(false)
            || is_dot_keyword(&right_word)
        {
            return None;
        }

        // A directly attached paren group becomes part of the attribute
        // (subscripted member access), unless it is a slash query, which
        // wraps the whole access afterwards instead.
        let mut attribute = right_word.clone();
        let mut end = rw;
        let mut subscripted = false;
        if rw < chars.len()
            && chars[rw] == '('
            && !mask[rw]
            && parse_slash(chars, mask, rw).is_none()
        {
            if let Some(close) = matching_paren(chars, mask, rw) {
                let mut inner = String::new();
                self.rewrite(&chars[rw + 1..close], base + rw + 1, &mut inner);
                attribute.push('(');
                attribute.push_str(&inner);
                attribute.push(')');
                end = close + 1;
                subscripted = true;
            }
        }

        let left_text = out[mark_out..].to_string();
        let orig_left: String = chars[mark_orig..i].iter().collect();
        let flagged = subscripted || left_is_group || left_text != orig_left;
        let replacement = alloc::format!("D__({left_text},{attribute})");
        out.replace_range(mark_out.., &replacement);

        let original: String = chars[mark_orig..end].iter().collect();
        self.records.push(RewriteRecord {
            rule: RewriteRule::DotNotation,
            span: self.stmt.span_of(base + mark_orig, base + end),
            original,
            replacement,
            flagged,
        });
        *mark = Some((mark_out, mark_orig));
        Some(end)
    }

    /// Attempt a slash-notation rewrite at `chars[i] == '('`. Returns the
    /// char index after the closing paren on success.
    fn try_slash(
        &mut self,
        chars: &[char],
        mask: &[bool],
        base: usize,
        i: usize,
        mark: &mut Option<(usize, usize)>,
        out: &mut String,
    ) -> Option<usize> {
        let (mark_out, mark_orig) = (*mark)?;
        match parse_slash(chars, mask, i) {
            Some(Ok((digits, end))) => {
                let left_text = out[mark_out..].to_string();
                let replacement = alloc::format!("S__({left_text},{digits})");
                out.replace_range(mark_out.., &replacement);
                let original: String = chars[mark_orig..end].iter().collect();
                self.records.push(RewriteRecord {
                    rule: RewriteRule::SlashNotation,
                    span: self.stmt.span_of(base + mark_orig, base + end),
                    original,
                    replacement,
                    flagged: false,
                });
                *mark = Some((mark_out, mark_orig));
                Some(end)
            }
            Some(Err(())) => {
                self.warnings.push(Warning::new(
                    "slash query index is not an unsigned integer literal; left unchanged"
                        .to_string(),
                    Some(self.stmt.span_of(base + i, base + i + 1)),
                ));
                None
            }
            None => None,
        }
    }
}

/// Recognize `( / digits )` (blanks allowed) starting at `chars[i] == '('`.
/// `Some(Ok((digits, end)))` on success with `end` past the `)`;
/// `Some(Err(()))` when a `(/` intro has a malformed index; `None` when the
/// group is not a slash form at all.
fn parse_slash(chars: &[char], mask: &[bool], i: usize) -> Option<Result<(String, usize), ()>> {
    debug_assert_eq!(chars[i], '(');
    let n = chars.len();
    let mut j = i + 1;
    while j < n && chars[j] == ' ' {
        j += 1;
    }
    if j >= n || chars[j] != '/' || mask[j] {
        return None;
    }
    j += 1;
    while j < n && chars[j] == ' ' {
        j += 1;
    }
    let digits_start = j;
    while j < n && chars[j].is_ascii_digit() {
        j += 1;
    }
    if j == digits_start {
        return Some(Err(()));
    }
    let digits: String = chars[digits_start..j].iter().collect();
    while j < n && chars[j] == ' ' {
        j += 1;
    }
    if j >= n || chars[j] != ')' {
        return Some(Err(()));
    }
    Some(Ok((digits, j + 1)))
}

/// Index of the `)` matching the `(` at `open`, ignoring literal content.
fn matching_paren(chars: &[char], mask: &[bool], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, &c) in chars.iter().enumerate().skip(open) {
        if mask[i] {
            continue;
        }
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn run(source: &str) -> DeEsopified {
        de_esopify(FileId(0), source).unwrap()
    }

    #[test]
    fn scan_markers_finds_all_three() {
        let src = "      X = D__(A,B)\nc@_ note\n      Y = S__(A,1)\n";
        let collisions = scan_markers(FileId(0), src);
        let kinds: Vec<Marker> = collisions.iter().map(|c| c.marker).collect();
        assert_eq!(kinds, vec![Marker::DotForm, Marker::Annotation, Marker::SlashForm]);
    }

    #[test]
    fn scan_markers_clean_and_empty_sources() {
        assert!(scan_markers(FileId(0), "").is_empty());
        assert!(scan_markers(FileId(0), "      UR.UNAME = NAME\n").is_empty());
    }

    #[test]
    fn segment_lines_become_annotations() {
        let result = run("      SEGMENT, USER\n       INTEGER UBB(UBBCNT)\n      END SEGMENT\n");
        let lines: Vec<&str> = result.annotated.lines().collect();
        assert_eq!(lines[0], "c@_  segment, user");
        assert_eq!(lines[1], "       INTEGER UBB(UBBCNT)");
        assert_eq!(lines[2], "c@_  end segment");
        let rules: Vec<RewriteRule> = result.log.records.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec![RewriteRule::SegBegin, RewriteRule::SegEnd]);
    }

    #[test]
    fn pointer_and_instruction_annotations() {
        let result = run("      POINTEUR UR.USER\n      SEGINI, UR\n      END\n");
        let lines: Vec<&str> = result.annotated.lines().collect();
        assert_eq!(lines[0], "c@_  pointeur ur.user");
        assert_eq!(lines[1], "c@_  segini, ur");
        assert_eq!(lines[2], "      END");
    }

    #[test]
    fn malformed_pointeur_is_an_error() {
        let err = de_esopify(FileId(0), "      POINTEUR UR\n").unwrap_err();
        assert!(matches!(err, IslandError::MalformedPointerDecl { .. }));
    }

    #[test]
    fn multi_binding_pointeur_stays_on_one_annotation() {
        let result = run("      POINTEUR A.S, B.T\n");
        assert_eq!(result.annotated, "c@_  pointeur a.s, b.t\n");
        assert_eq!(result.log.counts().pointers, 1);
    }

    #[test]
    fn dot_rewrite_keeps_water_intact() {
        let result = run("      UR.UNAME = NAME\n");
        assert_eq!(result.annotated, "      D__(UR,UNAME) = NAME\n");
        assert_eq!(result.log.records.len(), 1);
        assert_eq!(result.log.records[0].original, "UR.UNAME");
        assert_eq!(result.log.records[0].replacement, "D__(UR,UNAME)");
        assert!(!result.log.records[0].flagged);
    }

    #[test]
    fn slash_wraps_dot_rewrite() {
        let result = run("      WRITE(*,*) UR.UBB(/1)\n");
        assert_eq!(result.annotated, "      WRITE(*,*) S__(D__(UR,UBB),1)\n");
        let rules: Vec<RewriteRule> = result.log.records.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec![RewriteRule::DotNotation, RewriteRule::SlashNotation]);
        assert_eq!(result.log.records[1].original, "UR.UBB(/1)");
        assert_eq!(result.log.records[1].replacement, "S__(D__(UR,UBB),1)");
    }

    #[test]
    fn logical_operators_and_literals_untouched() {
        for src in [
            "      IF (A .LT. 5) THEN\n",
            "      IF (A.LT.5) X = 1\n",
            "      X = 1.5\n",
            "      X = .5 + 1.\n",
            "      X = 1.5E3\n",
            "      FOUND = B .AND. C\n",
            "      FOUND = B.AND.C\n",
            "      MSG = 'A.B'\n",
        ] {
            let result = run(src);
            assert_eq!(result.annotated, src, "source: {src}");
            assert!(result.log.records.is_empty(), "source: {src}");
        }
    }

    #[test]
    fn chained_access_rewrites_left_associatively() {
        let result = run("      X = A.B.C\n");
        assert_eq!(result.annotated, "      X = D__(D__(A,B),C)\n");
        assert_eq!(result.log.records.len(), 2);
        assert!(!result.log.records[0].flagged);
        assert!(result.log.records[1].flagged);
    }

    #[test]
    fn subscripted_member_access() {
        let result = run("      LIB.LUSERS(N) = UR\n");
        assert_eq!(result.annotated, "      D__(LIB,LUSERS(N)) = UR\n");
        assert_eq!(result.log.records.len(), 1);
        assert!(result.log.records[0].flagged);
    }

    #[test]
    fn dot_access_on_array_element() {
        let result = run("      X = A(I).B\n");
        assert_eq!(result.annotated, "      X = D__(A(I),B)\n");
        assert!(result.log.records[0].flagged);
    }

    #[test]
    fn grouped_expression_is_not_a_primary() {
        let result = run("      X = (A + B).C\n");
        assert_eq!(result.annotated, "      X = (A + B).C\n");
        assert!(result.log.records.is_empty());
    }

    #[test]
    fn keyword_lookalike_assignment_is_water() {
        let result = run("      SEGINIT = 3\n      SEGINI = 4\n      END\n");
        assert!(result.log.records.is_empty());
        assert!(result.annotated.contains("SEGINIT = 3"));
        assert!(result.annotated.contains("SEGINI = 4"));
    }

    #[test]
    fn pure_fortran_is_byte_identical() {
        let src = concat!(
            "      SUBROUTINE SWAP(A, B)\n",
            "      IMPLICIT NONE\n",
            "      INTEGER A, B, T\n",
            "C swap two values\n",
            "      T = A\n",
            "      A = B\n",
            "      B = T\n",
            "      RETURN\n",
            "      END\n",
        );
        let result = run(src);
        assert_eq!(result.annotated, src);
        assert!(result.log.records.is_empty());
        assert!(result.warnings.is_empty());
    }

    #[test]
    fn idempotent_on_own_output() {
        let src = concat!(
            "      SUBROUTINE NEWUSER(LIB,NAME)\n",
            "      INTEGER UBBCNT\n",
            "      SEGMENT, USER\n",
            "       CHARACTER*40 UNAME\n",
            "       INTEGER UBB(UBBCNT)\n",
            "      END SEGMENT\n",
            "      POINTEUR UR.USER\n",
            "      UBBCNT = 0\n",
            "      SEGINI, UR\n",
            "      UR.UNAME = NAME\n",
            "      WRITE(*,*) UR.UBB(/1)\n",
            "      END\n",
        );
        let first = run(src);
        let second = run(&first.annotated);
        assert_eq!(second.annotated, first.annotated);
        assert!(second.log.records.is_empty());
        // Marker collisions in the annotated text surface as warnings only.
        assert!(!second.warnings.is_empty());
    }

    #[test]
    fn unterminated_segment_detected() {
        let err = de_esopify(FileId(0), "      SEGMENT, USER\n      END\n").unwrap_err();
        assert!(matches!(err, IslandError::UnterminatedSegment { .. }));
        let err = de_esopify(FileId(0), "      SEGMENT, USER\n").unwrap_err();
        assert!(matches!(err, IslandError::UnterminatedSegment { .. }));
    }

    #[test]
    fn long_rewrite_rewraps_with_continuation() {
        // Three dot accesses on long names push the rewritten statement past
        // column 72; the renderer must wrap it with a continuation line.
        let src = "      RESULT = LONGPTRA.MEMB1 + LONGPTRB.MEMB2 + LONGPTRC.MEMB3X\n";
        let result = run(src);
        assert!(result.annotated.lines().count() >= 2);
        assert!(check_line_lengths(FileId(0), &result.annotated).is_empty());
        // Re-assembling the wrapped output must reproduce the rewritten text.
        let (lines, _) = classify_source(FileId(0), &result.annotated);
        let units = assemble(&lines).unwrap();
        match &units[0] {
            SourceUnit::Statement(s) => {
                assert_eq!(
                    s.text.replace(' ', ""),
                    "RESULT=D__(LONGPTRA,MEMB1)+D__(LONGPTRB,MEMB2)+D__(LONGPTRC,MEMB3X)"
                );
            }
            other => panic!("expected statement, got {other:?}"),
        }
    }

    #[test]
    fn empty_source() {
        let result = run("");
        assert_eq!(result.annotated, "");
        assert!(result.log.records.is_empty());
        assert!(check_line_lengths(FileId(0), "").is_empty());
    }

    #[test]
    fn labels_survive_on_water_and_warn_on_islands() {
        let result = run("   10 UR.UNAME = NAME\n");
        assert_eq!(result.annotated, "   10 D__(UR,UNAME) = NAME\n");
        let result = run("   20 SEGINI, UR\n      END\n");
        assert!(result.warnings.iter().any(|w| w.message.contains("label")));
        assert!(result.annotated.starts_with("c@_  segini, ur"));
    }
}
