//! Finite group presentations and their text format.
//!
//! The format is line oriented:
//!
//! ```text
//! # comment
//! generators: a b t
//! relator: t a t^-1 a^-2
//! relator: b^3
//! ```
//!
//! One `generators:` line comes first, then any number of `relator:` lines.
//! A token is a generator name, optionally followed by `^` and a signed
//! exponent. `#` starts a comment anywhere. Relators are freely and
//! cyclically reduced on ingest; a relator that reduces to nothing is
//! rejected.

use crate::error::{Error, ParseError, Result};
use crate::nielsen::Automorphism;
use crate::word::{Generator, Letter, Sign, Word, MAX_WORD_LETTERS};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Row-major matrix of relator exponent sums: one row per relator, one
/// column per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl ExponentMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        ExponentMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column_all_zero(&self, col: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, col) == 0)
    }
}

/// A finite presentation: named generators and freely reduced relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    /// Build from parts. Names must be distinct identifiers, every relator
    /// must be a nonempty word over the generators. Words are stored as
    /// given (no cyclic reduction here; parsing does that).
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        if generator_names.is_empty() {
            return Err(Error::InvalidArgument("no generators".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &generator_names {
            if !valid_name(name) {
                return Err(Error::InvalidArgument(format!(
                    "invalid generator name {name:?}"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate generator name {name:?}"
                )));
            }
        }
        let rank = generator_names.len();
        for (k, r) in relators.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::InvalidArgument(format!("relator {k} is trivial")));
            }
            if !r.fits_rank(rank) {
                return Err(Error::GeneratorOutOfRank {
                    index: r.max_generator_index().unwrap_or(0),
                    rank,
                });
            }
        }
        Ok(Presentation {
            generator_names,
            relators,
        })
    }

    pub fn rank(&self) -> usize {
        self.generator_names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Generators minus relators.
    pub fn deficiency(&self) -> i64 {
        self.rank() as i64 - self.relators.len() as i64
    }

    /// At least two more generators than relators.
    pub fn is_bp(&self) -> bool {
        self.deficiency() >= 2
    }

    pub fn exponent_matrix(&self) -> ExponentMatrix {
        let rank = self.rank();
        let rows = self
            .relators
            .iter()
            .map(|r| r.exponent_vector(rank).expect("relators fit rank"))
            .collect();
        ExponentMatrix::from_rows(rows, rank)
    }

    /// Image presentation under an automorphism of the ambient free group.
    /// Images are cyclically reduced, since a presentation only determines
    /// relators up to conjugacy.
    pub fn apply_automorphism(&self, auto: &Automorphism) -> Result<Presentation> {
        if auto.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: auto.rank(),
            });
        }
        let relators = self
            .relators
            .iter()
            .map(|r| Ok(auto.apply(r)?.cyclically_reduced()))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(self.generator_names.clone(), relators)
    }

    /// Parse the line-oriented text format.
    pub fn parse(text: &str) -> std::result::Result<Presentation, ParseError> {
        let mut names: Option<(Vec<String>, HashMap<String, u32>)> = None;
        let mut relators = Vec::new();
        for (lno, raw_line) in text.lines().enumerate() {
            let line_no = lno + 1;
            let line = match raw_line.find('#') {
                Some(p) => &raw_line[..p],
                None => raw_line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let (keyword, rest, rest_col) = split_keyword(line, line_no)?;
            match keyword {
                "generators" => {
                    if names.is_some() {
                        return Err(ParseError::new(line_no, 1, "second generators line"));
                    }
                    let mut list = Vec::new();
                    let mut index = HashMap::new();
                    for (col, tok) in tokens(rest, rest_col) {
                        if !valid_name(tok) {
                            return Err(ParseError::new(
                                line_no,
                                col,
                                format!("invalid generator name {tok:?}"),
                            ));
                        }
                        if index.insert(tok.to_string(), list.len() as u32).is_some() {
                            return Err(ParseError::new(
                                line_no,
                                col,
                                format!("duplicate generator {tok:?}"),
                            ));
                        }
                        list.push(tok.to_string());
                    }
                    if list.is_empty() {
                        return Err(ParseError::new(line_no, 1, "no generators listed"));
                    }
                    names = Some((list, index));
                }
                "relator" => {
                    let (_, index) = names.as_ref().ok_or_else(|| {
                        ParseError::new(line_no, 1, "relator before generators line")
                    })?;
                    let word = parse_word_line(rest, rest_col, line_no, index)?;
                    let word = word.cyclically_reduced();
                    if word.is_empty() {
                        return Err(ParseError::new(
                            line_no,
                            1,
                            "relator reduces to the empty word",
                        ));
                    }
                    relators.push(word);
                }
                other => {
                    return Err(ParseError::new(
                        line_no,
                        1,
                        format!("expected 'generators:' or 'relator:', found {other:?}"),
                    ));
                }
            }
        }
        let (list, _) = names.ok_or_else(|| ParseError::new(1, 1, "no generators line"))?;
        Presentation::new(list, relators).map_err(|e| match e {
            Error::Parse(p) => p,
            other => ParseError::new(1, 1, other.to_string()),
        })
    }

    /// Inverse of [`Presentation::parse`] on parsed values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("generators:");
        for n in &self.generator_names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str("relator: ");
            out.push_str(&format_word(r, &self.generator_names));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn split_keyword(
    line: &str,
    line_no: usize,
) -> std::result::Result<(&str, &str, usize), ParseError> {
    let trimmed_start = line.len() - line.trim_start().len();
    let body = &line[trimmed_start..];
    match body.find(':') {
        Some(p) => {
            let keyword = body[..p].trim_end();
            Ok((keyword, &body[p + 1..], trimmed_start + p + 2))
        }
        None => Err(ParseError::new(
            line_no,
            trimmed_start + 1,
            "expected a 'keyword:' prefix",
        )),
    }
}

/// Whitespace-split tokens of `s` with 1-based columns, `base_col` being the
/// column of `s[0]` in the original line.
fn tokens(s: &str, base_col: usize) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace().map(move |tok| {
        let off = tok.as_ptr() as usize - s.as_ptr() as usize;
        (base_col + off, tok)
    })
}

fn parse_word_line(
    s: &str,
    base_col: usize,
    line_no: usize,
    index: &HashMap<String, u32>,
) -> std::result::Result<Word, ParseError> {
    let mut letters = Vec::new();
    for (col, tok) in tokens(s, base_col) {
        let (name, exp) = match tok.find('^') {
            Some(p) => {
                let exp: i64 = tok[p + 1..].parse().map_err(|_| {
                    ParseError::new(line_no, col, format!("bad exponent in {tok:?}"))
                })?;
                (&tok[..p], exp)
            }
            None => (tok, 1),
        };
        let gen = *index
            .get(name)
            .ok_or_else(|| ParseError::new(line_no, col, format!("unknown generator {name:?}")))?;
        let count = exp.unsigned_abs() as usize;
        if count > MAX_WORD_LETTERS || letters.len() + count > MAX_WORD_LETTERS {
            return Err(ParseError::new(line_no, col, "word too long"));
        }
        let sign = if exp >= 0 { Sign::Plus } else { Sign::Minus };
        letters.extend(std::iter::repeat_n(
            Letter::new(Generator::new(gen), sign),
            count,
        ));
    }
    Ok(Word::reduce(letters))
}

/// Parse one word from whitespace separated `name^exp` tokens. Freely
/// reduces, does not cyclically reduce. The empty string is the empty word.
pub fn parse_word_tokens(s: &str, names: &[String]) -> std::result::Result<Word, ParseError> {
    let index: HashMap<String, u32> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect();
    parse_word_line(s, 1, 1, &index)
}

/// Render a word as `name^exp` tokens with runs collapsed. Empty word is
/// the empty string.
pub fn format_word(w: &Word, names: &[String]) -> String {
    let mut out = String::new();
    let letters = w.letters();
    let mut k = 0;
    while k < letters.len() {
        let l = letters[k];
        let mut run = 1;
        while k + run < letters.len() && letters[k + run] == l {
            run += 1;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&names[l.generator().index()]);
        let exp = l.sign().value() * run as i64;
        if exp != 1 {
            out.push('^');
            out.push_str(&exp.to_string());
        }
        k += run;
    }
    out
}

/// Serialization form: generator names plus relators in token syntax.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationDto {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

impl From<&Presentation> for PresentationDto {
    fn from(p: &Presentation) -> Self {
        PresentationDto {
            generators: p.generator_names.clone(),
            relators: p
                .relators
                .iter()
                .map(|r| format_word(r, &p.generator_names))
                .collect(),
        }
    }
}

impl TryFrom<PresentationDto> for Presentation {
    type Error = Error;

    /// Words are freely reduced but kept verbatim otherwise, so any
    /// in-memory presentation round-trips exactly.
    fn try_from(dto: PresentationDto) -> Result<Self> {
        let relators = dto
            .relators
            .iter()
            .map(|s| parse_word_tokens(s, &dto.generators).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(dto.generators, relators)
    }
}
