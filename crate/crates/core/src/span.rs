//! Source positions. Lines and columns are 1-based, matching the fixed-form
//! column numbering used everywhere else in this crate.

use core::fmt;

use serde::Serialize;

/// Opaque handle for one input file within a processing session. The meaning
/// of the number (usually an index into a path table) is the caller's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FileId(pub u32);

/// An inclusive region of source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct SourceSpan {
    #[serde(rename = "file")]
    pub file: FileId,
    /// Start line, 1-based.
    #[serde(rename = "sl")]
    pub start_line: u32,
    /// Start column, 1-based.
    #[serde(rename = "sc")]
    pub start_col: u32,
    /// End line, 1-based.
    #[serde(rename = "el")]
    pub end_line: u32,
    /// End column, 1-based, inclusive.
    #[serde(rename = "ec")]
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: FileId, start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Self {
        debug_assert!((start_line, start_col) <= (end_line, end_col));
        SourceSpan { file, start_line, start_col, end_line, end_col }
    }

    /// Span of a single point.
    pub fn point(file: FileId, line: u32, col: u32) -> Self {
        SourceSpan::new(file, line, col, line, col)
    }

    /// Smallest span covering both `self` and `other`.
    pub fn merge(self, other: SourceSpan) -> SourceSpan {
        debug_assert_eq!(self.file, other.file);
        let (start_line, start_col) = core::cmp::min(
            (self.start_line, self.start_col),
            (other.start_line, other.start_col),
        );
        let (end_line, end_col) =
            core::cmp::max((self.end_line, self.end_col), (other.end_line, other.end_col));
        SourceSpan { file: self.file, start_line, start_col, end_line, end_col }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start_line == self.end_line {
            write!(f, "{}:{}-{}", self.start_line, self.start_col, self.end_col)
        } else {
            write!(
                f,
                "{}:{}-{}:{}",
                self.start_line, self.start_col, self.end_line, self.end_col
            )
        }
    }
}
