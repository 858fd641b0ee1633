//! Line-based input formats.
//!
//! A document starts with `poset`, declares elements with `elem <name>` and
//! order facts with `le <name> <name>`. Later lines may add
//!
//! ```text
//! val [plain|sub|prob] 1/2 @ a + 1/2 @ b
//! cap 1 @ {a,b} + 2/3 @ {c}
//! step a=1 b=3
//! weak {a,b} > 3/4
//! weak 1/4 << {a}
//! ```
//!
//! `#` starts a comment. Errors carry 1-based line numbers.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::lp::GameMatrix;
use crate::order::FinitePoset;
use crate::powerdomain::SubbasicOpen;
use crate::rational::{parse_rational, Rational};
use crate::set::ElementSet;
use crate::valuation::{Flavor, SimpleCapacity, SimpleValuation, StepFunction};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    /// 1-based; 0 when the error is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Debug)]
pub struct Document {
    pub poset: FinitePoset,
    pub valuations: Vec<(Option<Flavor>, SimpleValuation)>,
    pub capacities: Vec<SimpleCapacity>,
    pub steps: Vec<StepFunction>,
    pub conjuncts: Vec<SubbasicOpen>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn rational(line: usize, text: &str) -> Result<Rational, ParseError> {
    parse_rational(text.trim()).ok_or_else(|| ParseError {
        line,
        message: format!("`{}` is not a rational", text.trim()),
    })
}

fn element(poset: &FinitePoset, line: usize, name: &str) -> Result<usize, ParseError> {
    poset.index_of(name.trim()).ok_or_else(|| ParseError {
        line,
        message: format!("unknown element `{}`", name.trim()),
    })
}

fn element_set(poset: &FinitePoset, line: usize, text: &str) -> Result<ElementSet, ParseError> {
    let t = text.trim();
    if !(t.starts_with('{') && t.ends_with('}')) {
        return err(line, format!("expected a set like {{a,b}}, found `{t}`"));
    }
    poset.parse_set(t).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })
}

/// Reads only the poset part of a document, rejecting more than
/// `max_size` elements.
pub fn parse_poset(text: &str, max_size: usize) -> Result<FinitePoset, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut header = false;
    for (no, line) in content_lines(text) {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "poset" if !header && words.len() == 1 => header = true,
            _ if !header => return err(no, "expected `poset` header"),
            "elem" => {
                if words.len() != 2 {
                    return err(no, "expected `elem <name>`");
                }
                names.push(words[1].to_string());
            }
            "le" => {
                if words.len() != 3 {
                    return err(no, "expected `le <name> <name>`");
                }
                pairs.push((words[1].to_string(), words[2].to_string()));
            }
            _ => {}
        }
    }
    if !header {
        return err(0, "missing `poset` header");
    }
    if names.len() > max_size {
        return err(0, format!("poset has {} elements, limit is {max_size}", names.len()));
    }
    FinitePoset::build(&names, &pairs).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

/// `[flavor] q @ e + q @ e ...` after the `val` keyword.
pub fn parse_valuation(
    poset: &FinitePoset,
    line: usize,
    text: &str,
) -> Result<(Option<Flavor>, SimpleValuation), ParseError> {
    let mut rest = text.trim();
    let mut flavor = None;
    if let Some((first, tail)) = rest.split_once(char::is_whitespace) {
        if let Some(f) = Flavor::parse(first) {
            flavor = Some(f);
            rest = tail.trim();
        }
    } else if let Some(f) = Flavor::parse(rest) {
        flavor = Some(f);
        rest = "";
    }
    let mut terms = Vec::new();
    if rest != "0" && !rest.is_empty() {
        for term in rest.split('+') {
            let Some((q, e)) = term.split_once('@') else {
                return err(line, format!("expected `q @ elem`, found `{}`", term.trim()));
            };
            terms.push((element(poset, line, e)?, rational(line, q)?));
        }
    }
    let v = SimpleValuation::from_weights(terms).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    if let Some(f) = flavor {
        if !f.admits(&v.mass()) {
            return err(line, format!("mass {} is not allowed for flavor {f}", v.mass()));
        }
    }
    Ok((flavor, v))
}

/// `q @ {a,b} + ...` after the `cap` keyword.
pub fn parse_capacity(poset: &FinitePoset, line: usize, text: &str) -> Result<SimpleCapacity, ParseError> {
    let mut terms = Vec::new();
    let text = text.trim();
    if text != "0" && !text.is_empty() {
        for term in text.split('+') {
            let Some((q, s)) = term.split_once('@') else {
                return err(line, format!("expected `q @ {{set}}`, found `{}`", term.trim()));
            };
            terms.push((rational(line, q)?, element_set(poset, line, s)?));
        }
    }
    SimpleCapacity::new(terms).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })
}

/// `a=1 b=3` after the `step` keyword; unlisted elements get 0.
pub fn parse_step(poset: &FinitePoset, line: usize, text: &str) -> Result<StepFunction, ParseError> {
    let mut values = vec![Rational::zero(); poset.size()];
    for token in text.split_whitespace() {
        let Some((name, q)) = token.split_once('=') else {
            return err(line, format!("expected `elem=q`, found `{token}`"));
        };
        values[element(poset, line, name)?] = rational(line, q)?;
    }
    let h = StepFunction::new(values).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    h.check_monotone(poset).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    Ok(h)
}

/// `{a,b} > r` or `r << {a,b}` after the `weak` keyword.
pub fn parse_conjunct(poset: &FinitePoset, line: usize, text: &str) -> Result<SubbasicOpen, ParseError> {
    let open = |s: &str| -> Result<_, ParseError> {
        let set = element_set(poset, line, s)?;
        poset.open(set).ok_or_else(|| ParseError {
            line,
            message: format!("{} is not upward closed", poset.format_set(set)),
        })
    };
    if let Some((r, u)) = text.split_once("<<") {
        return Ok(SubbasicOpen::way_below(rational(line, r)?, open(u)?));
    }
    if let Some((u, r)) = text.split_once('>') {
        return Ok(SubbasicOpen::greater(open(u)?, rational(line, r)?));
    }
    err(line, "expected `{set} > r` or `r << {set}`")
}

pub fn parse_document(text: &str, max_size: usize) -> Result<Document, ParseError> {
    let poset = parse_poset(text, max_size)?;
    let mut doc = Document {
        poset,
        valuations: Vec::new(),
        capacities: Vec::new(),
        steps: Vec::new(),
        conjuncts: Vec::new(),
    };
    for (no, line) in content_lines(text) {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "poset" | "elem" | "le" => {}
            "val" => doc.valuations.push(parse_valuation(&doc.poset, no, rest)?),
            "cap" => doc.capacities.push(parse_capacity(&doc.poset, no, rest)?),
            "step" => doc.steps.push(parse_step(&doc.poset, no, rest)?),
            "weak" => doc.conjuncts.push(parse_conjunct(&doc.poset, no, rest)?),
            other => return err(no, format!("unknown directive `{other}`")),
        }
    }
    Ok(doc)
}

/// `rows cols` followed by the entries in row-major order.
pub fn parse_matrix(text: &str) -> Result<GameMatrix, ParseError> {
    let mut tokens = content_lines(text).flat_map(|(no, line)| line.split_whitespace().map(move |t| (no, t)));
    let mut dim = |what: &str| -> Result<usize, ParseError> {
        match tokens.next() {
            Some((no, t)) => t.parse::<usize>().map_err(|_| ParseError {
                line: no,
                message: format!("`{t}` is not a valid {what} count"),
            }),
            None => err(0, format!("missing {what} count")),
        }
    };
    let rows = dim("row")?;
    let cols = dim("column")?;
    let mut entries = Vec::with_capacity(rows * cols);
    for (no, t) in tokens {
        entries.push(rational(no, t)?);
    }
    if rows == 0 || cols == 0 || entries.len() != rows * cols {
        return err(
            0,
            format!(
                "expected {rows}x{cols} = {} entries, found {}",
                rows * cols,
                entries.len()
            ),
        );
    }
    let matrix: Vec<Vec<Rational>> = entries.chunks(cols).map(<[Rational]>::to_vec).collect();
    GameMatrix::new(matrix).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

/// `{0,1}` as a set of naturals.
pub fn parse_nat_set(text: &str) -> Option<BTreeSet<u64>> {
    let inner = text.trim().strip_prefix('{')?.strip_suffix('}')?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().ok())
        .collect()
}

/// Pairs of `E={..}` and `r=q` tokens.
pub fn parse_alpha_conjuncts<S: AsRef<str>>(tokens: &[S]) -> Result<Vec<(BTreeSet<u64>, Rational)>, ParseError> {
    if !tokens.len().is_multiple_of(2) {
        return err(0, "conjuncts come in `E={..} r=q` pairs");
    }
    tokens
        .chunks(2)
        .enumerate()
        .map(|(i, pair)| {
            let bad = |msg: String| ParseError {
                line: 0,
                message: format!("conjunct {}: {msg}", i + 1),
            };
            let e = pair[0]
                .as_ref()
                .strip_prefix("E=")
                .and_then(parse_nat_set)
                .ok_or_else(|| bad(format!("expected `E={{..}}`, found `{}`", pair[0].as_ref())))?;
            let r = pair[1]
                .as_ref()
                .strip_prefix("r=")
                .and_then(parse_rational)
                .ok_or_else(|| bad(format!("expected `r=q`, found `{}`", pair[1].as_ref())))?;
            Ok((e, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const CHAIN: &str = "poset\nelem a\nelem b\nle a b # a below b\n";

    #[test]
    fn reads_poset() {
        let p = parse_poset(CHAIN, 16).unwrap();
        assert!(p.leq(0, 1) && !p.leq(1, 0));
        let e = parse_poset("poset\nelem a\nle a\n", 16).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_poset("elem a\n", 16).is_err());
        assert!(parse_poset(CHAIN, 1).is_err());
        assert!(parse_poset("poset\nelem a\nelem b\nle a b\nle b a\n", 16).is_err());
    }

    #[test]
    fn reads_document() {
        let text = format!(
            "{CHAIN}val sub 1/2 @ a + 1/3 @ b\ncap 1 @ {{a,b}}\nstep a=1 b=3\nweak {{a,b}} > 1/2\nweak 1/4 << {{b}}\n"
        );
        let d = parse_document(&text, 16).unwrap();
        assert_eq!(d.valuations[0].0, Some(Flavor::Sub));
        assert_eq!(d.valuations[0].1.weight(1), ratio(1, 3));
        assert_eq!(d.capacities[0].terms().len(), 1);
        assert_eq!(d.steps[0].value(1), &int(3));
        assert_eq!(d.conjuncts.len(), 2);
        assert_eq!(d.conjuncts[1].threshold, ratio(1, 4));
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_document(&format!("{CHAIN}val 1/2 @ c\n"), 16).unwrap_err();
        assert_eq!(e.line, 5);
        let e = parse_document(&format!("{CHAIN}weak {{a}} > 1/2\n"), 16).unwrap_err();
        assert_eq!(e.line, 5);
        let e = parse_document(&format!("{CHAIN}step a=3 b=1\n"), 16).unwrap_err();
        assert_eq!(e.line, 5);
        let e = parse_document(&format!("{CHAIN}val prob 1/2 @ a\n"), 16).unwrap_err();
        assert_eq!(e.line, 5);
    }

    #[test]
    fn reads_matrix() {
        let m = parse_matrix("2 2\n1 -1\n-1 1\n").unwrap();
        assert_eq!(m.get(1, 0), &int(-1));
        assert!(parse_matrix("2 2\n1 2 3\n").is_err());
        assert!(parse_matrix("1 1\nx\n").is_err());
    }

    #[test]
    fn reads_alpha_tokens() {
        let c = parse_alpha_conjuncts(&["E={0,1}", "r=1/2"]).unwrap();
        assert_eq!(c, vec![([0, 1].into_iter().collect(), ratio(1, 2))]);
        assert!(parse_alpha_conjuncts(&["E={0,1}"]).is_err());
        assert!(parse_alpha_conjuncts(&["E={x}", "r=1/2"]).is_err());
        assert_eq!(parse_nat_set("{}"), Some(BTreeSet::new()));
    }
}
