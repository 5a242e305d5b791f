//! Non-fatal diagnostics. Operations that must stay total (line
//! classification, the island rewriter, statement parsing) record warnings
//! instead of failing; callers decide whether to surface them.

use alloc::string::String;
use core::fmt;

use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl Warning {
    pub fn new(message: String, span: Option<SourceSpan>) -> Self {
        Warning { message, span }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(f, "{}: {}", span, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}
