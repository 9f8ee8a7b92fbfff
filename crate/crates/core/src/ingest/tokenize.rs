use regex::Regex;

use crate::error::{Error, Result};

/// Splits document text into lowercase tokens.
///
/// The default rule lowercases and splits on every maximal run of
/// non-alphanumeric characters. A custom pattern instead takes every regex
/// match in the lowercased text as a token.
#[derive(Debug, Clone, Default)]
pub enum Tokenizer {
    #[default]
    Alphanumeric,
    Pattern(Regex),
}

impl Tokenizer {
    pub fn with_pattern(pattern: &str) -> Result<Self> {
        Regex::new(pattern)
            .map(Tokenizer::Pattern)
            .map_err(|e| Error::config(format!("invalid token pattern `{pattern}`: {e}")))
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let lower = text.to_lowercase();
        match self {
            Tokenizer::Alphanumeric => lower
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect(),
            Tokenizer::Pattern(re) => re
                .find_iter(&lower)
                .map(|m| m.as_str())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect(),
        }
    }
}
