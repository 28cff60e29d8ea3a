//! Line-oriented native instance format.
//!
//! ```text
//! # comment
//! @name free-form metadata value
//! pmpdc 4 4 2
//! 0 1 2 10
//! ...              (n rows of m distances)
//! 3 3 3 3          (distance limits, one per demand point)
//! ```
//!
//! A `pmpdc n n p` file may give an undirected graph instead of the matrix:
//! a line `edges E` followed by `E` lines `u v w` (0-based vertices); the
//! matrix is then the shortest-path completion. Approval profiles use
//! `approval n m k` followed by `n` rows of `0`/`1` (separated or packed as
//! `0110`). Sensor scenarios fit on one line:
//! `sensors a b delta Delta c_1 .. c_{s-1} w_1 .. w_s`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::committee::CommitteeProblem;
use crate::error::{Error, ParseError, Result};
use crate::pmedian::PMedianInstance;
use crate::primitives::{ApprovalProfile, DistanceMatrix};
use crate::sensors::{Rect, ZonePartition};

use super::orlib::shortest_paths;

/// Rectangle, separation and range thresholds, and fault zones for the sensor criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorScenario {
    pub rect: Rect,
    /// Minimum pairwise separation for the min-max-max criterion.
    pub delta: f64,
    /// Range threshold for the maximum-area criterion.
    pub range: f64,
    pub zones: ZonePartition,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NativeBody {
    PMedian(PMedianInstance),
    Approval(CommitteeProblem),
    Sensors(SensorScenario),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NativeFile {
    pub metadata: BTreeMap<String, String>,
    pub body: NativeBody,
}

impl NativeFile {
    pub fn new(body: NativeBody) -> Self {
        Self {
            metadata: BTreeMap::new(),
            body,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        ParseError::new(self.line, self.column, message).into()
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected {what}, found {:?}", self.text)))
    }

    fn distance(&self) -> Result<f64> {
        let v: f64 = self.parse("a distance")?;
        if !v.is_finite() || v < 0.0 {
            return Err(self.error(format!("distance {v} must be finite and nonnegative")));
        }
        Ok(v)
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

fn lines(text: &str) -> (Vec<Line<'_>>, BTreeMap<String, String>) {
    let mut out = Vec::new();
    let mut meta = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if let Some(rest) = trimmed.strip_prefix('@') {
            let mut parts = rest.splitn(2, char::is_whitespace);
            let key = parts.next().unwrap_or("").to_string();
            let value = parts.next().unwrap_or("").trim().to_string();
            meta.insert(key, value);
            continue;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (col, ch) in content
            .char_indices()
            .chain(std::iter::once((content.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(col),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &content[s..col],
                        line: idx + 1,
                        column: content[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: idx + 1,
                tokens,
            });
        }
    }
    (out, meta)
}

fn eof_error(text: &str, what: &str) -> Error {
    let last = text.lines().count().max(1);
    ParseError::new(last, 1, format!("unexpected end of input, expected {what}")).into()
}

/// Parses a native instance file of any kind.
pub fn parse_native(text: &str) -> Result<NativeFile> {
    let (lines, metadata) = lines(text);
    let Some(header) = lines.first() else {
        return Err(eof_error(text, "a header line"));
    };
    let kind = header.tokens[0];
    let body = match kind.text {
        "pmpdc" => NativeBody::PMedian(parse_pmpdc(text, &lines)?),
        "approval" => NativeBody::Approval(parse_approval(text, &lines)?),
        "sensors" => NativeBody::Sensors(parse_sensors(&lines)?),
        other => {
            return Err(kind.error(format!(
                "unknown problem kind {other:?}, expected pmpdc, approval or sensors"
            )))
        }
    };
    Ok(NativeFile { metadata, body })
}

fn header_counts(line: &Line<'_>, names: &[&str]) -> Result<Vec<usize>> {
    if line.tokens.len() != names.len() + 1 {
        let last = line.tokens.last().expect("nonempty line");
        return Err(last.error(format!(
            "header needs {} fields after {:?} ({}), found {}",
            names.len(),
            line.tokens[0].text,
            names.join(" "),
            line.tokens.len() - 1
        )));
    }
    line.tokens[1..]
        .iter()
        .zip(names)
        .map(|(t, name)| t.parse::<usize>(&format!("a count for {name}")))
        .collect()
}

fn expect_len(line: &Line<'_>, len: usize, what: &str) -> Result<()> {
    if line.tokens.len() != len {
        let tok = line
            .tokens
            .get(len)
            .or(line.tokens.last())
            .expect("nonempty line");
        return Err(tok.error(format!(
            "line {} has {} entries, {what} needs {len}",
            line.number,
            line.tokens.len()
        )));
    }
    Ok(())
}

fn parse_pmpdc(text: &str, lines: &[Line<'_>]) -> Result<PMedianInstance> {
    let header = &lines[0];
    let counts = header_counts(header, &["n", "m", "p"])?;
    let (n, m, p) = (counts[0], counts[1], counts[2]);
    if n == 0 || m == 0 {
        return Err(header.tokens[1].error("n and m must be positive"));
    }
    if p == 0 || p > m {
        return Err(header.tokens[3].error(format!("p must lie in 1..={m}")));
    }
    let mut rest = lines[1..].iter();

    let first = rest
        .next()
        .ok_or_else(|| eof_error(text, "distance rows"))?;
    let dm = if first.tokens[0].text == "edges" {
        if n != m {
            return Err(
                first.tokens[0].error("edge lists need n == m (sites are the graph vertices)")
            );
        }
        expect_len(first, 2, "an edge count")?;
        let e: usize = first.tokens[1].parse("an edge count")?;
        let mut edges = Vec::with_capacity(e);
        for _ in 0..e {
            let line = rest.next().ok_or_else(|| eof_error(text, "an edge line"))?;
            expect_len(line, 3, "an edge `u v w`")?;
            let u: usize = line.tokens[0].parse("a vertex index")?;
            let v: usize = line.tokens[1].parse("a vertex index")?;
            for (t, x) in [(&line.tokens[0], u), (&line.tokens[1], v)] {
                if x >= n {
                    return Err(t.error(format!("vertex {x} out of range 0..{n}")));
                }
            }
            edges.push((u, v, line.tokens[2].distance()?));
        }
        let d = shortest_paths(n, &edges)?;
        DistanceMatrix::from_rows(&d)?
    } else {
        let mut rows = Vec::with_capacity(n);
        let mut line = Some(first);
        for _ in 0..n {
            let l = match line.take() {
                Some(l) => l,
                None => rest
                    .next()
                    .ok_or_else(|| eof_error(text, "a distance row"))?,
            };
            expect_len(l, m, "a distance row")?;
            rows.push(
                l.tokens
                    .iter()
                    .map(Token::distance)
                    .collect::<Result<Vec<f64>>>()?,
            );
        }
        DistanceMatrix::from_rows(&rows)?
    };

    let s_line = rest
        .next()
        .ok_or_else(|| eof_error(text, "the distance-limit line"))?;
    if s_line.tokens.len() != n {
        return Err(s_line.tokens[0].error(format!(
            "distance-limit vector on line {} has {} entries, expected n = {n}",
            s_line.number,
            s_line.tokens.len()
        )));
    }
    let s = s_line
        .tokens
        .iter()
        .map(Token::distance)
        .collect::<Result<Vec<f64>>>()?;
    if let Some(extra) = rest.next() {
        return Err(extra.tokens[0].error("unexpected trailing content"));
    }
    PMedianInstance::new(dm, p, s)
}

fn parse_approval(text: &str, lines: &[Line<'_>]) -> Result<CommitteeProblem> {
    let header = &lines[0];
    let counts = header_counts(header, &["n", "m", "k"])?;
    let (n, m, k) = (counts[0], counts[1], counts[2]);
    if n == 0 || m == 0 {
        return Err(header.tokens[1].error("n and m must be positive"));
    }
    if k == 0 || k > n {
        return Err(header.tokens[3].error(format!("k must lie in 1..={n}")));
    }
    let mut rows = Vec::with_capacity(n);
    let mut rest = lines[1..].iter();
    for _ in 0..n {
        let line = rest.next().ok_or_else(|| eof_error(text, "a ballot row"))?;
        let row = if line.tokens.len() == 1 && m > 1 {
            let tok = line.tokens[0];
            let bits: Vec<char> = tok.text.chars().collect();
            if bits.len() != m {
                return Err(tok.error(format!("ballot has {} entries, expected {m}", bits.len())));
            }
            bits.iter()
                .enumerate()
                .map(|(offset, c)| bit(*c, tok.line, tok.column + offset))
                .collect::<Result<Vec<bool>>>()?
        } else {
            expect_len(line, m, "a ballot row")?;
            line.tokens
                .iter()
                .map(|t| match t.text {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => {
                        Err(t.error(format!("ballot entries must be 0 or 1, found {other:?}")))
                    }
                })
                .collect::<Result<Vec<bool>>>()?
        };
        rows.push(row);
    }
    if let Some(extra) = rest.next() {
        return Err(extra.tokens[0].error("unexpected trailing content"));
    }
    CommitteeProblem::new(ApprovalProfile::new(rows)?, k)
}

fn bit(c: char, line: usize, column: usize) -> Result<bool> {
    match c {
        '0' => Ok(false),
        '1' => Ok(true),
        other => Err(ParseError::new(
            line,
            column,
            format!("ballot entries must be 0 or 1, found {other:?}"),
        )
        .into()),
    }
}

fn parse_sensors(lines: &[Line<'_>]) -> Result<SensorScenario> {
    let header = &lines[0];
    let nums = header.tokens[1..]
        .iter()
        .map(|t| t.parse::<f64>("a number"))
        .collect::<Result<Vec<f64>>>()?;
    // a b delta Delta, then s-1 cuts and s weights
    if nums.len() < 5 || (nums.len() - 4) % 2 == 0 {
        let tok = header.tokens.last().expect("nonempty line");
        return Err(
            tok.error("sensors header needs `a b delta Delta` followed by s-1 cuts and s weights")
        );
    }
    let strips = (nums.len() - 3) / 2;
    let rect = Rect::new(nums[0], nums[1]).map_err(|e| header.tokens[1].error(e.to_string()))?;
    let cuts = &nums[4..4 + strips - 1];
    let weights = &nums[4 + strips - 1..];
    let zones = ZonePartition::new(&rect, cuts, weights)
        .map_err(|e| header.tokens[5].error(e.to_string()))?;
    for (i, name) in [(2, "delta"), (3, "Delta")] {
        if !(nums[i] > 0.0) {
            return Err(header.tokens[i + 1].error(format!("{name} must be positive")));
        }
    }
    if let Some(extra) = lines.get(1) {
        return Err(extra.tokens[0].error("unexpected trailing content"));
    }
    Ok(SensorScenario {
        rect,
        delta: nums[2],
        range: nums[3],
        zones,
    })
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes a file that [`parse_native`] reads back to an equal value.
/// P-median matrices are always written out in full.
pub fn to_native_string(file: &NativeFile) -> String {
    let mut out = String::new();
    for (k, v) in &file.metadata {
        let _ = writeln!(out, "@{k} {v}");
    }
    match &file.body {
        NativeBody::PMedian(inst) => {
            let dm = inst.distances();
            let _ = writeln!(out, "pmpdc {} {} {}", dm.n_demand(), dm.n_sites(), inst.p());
            for row in dm.rows() {
                let _ = writeln!(out, "{}", join(row));
            }
            let _ = writeln!(out, "{}", join(inst.limits()));
        }
        NativeBody::Approval(prob) => {
            let profile = prob.profile();
            let _ = writeln!(
                out,
                "approval {} {} {}",
                profile.n_voters(),
                profile.m_candidates(),
                prob.k()
            );
            for row in profile.rows() {
                let _ = writeln!(out, "{}", join(row.iter().map(|&b| u8::from(b))));
            }
        }
        NativeBody::Sensors(sc) => {
            let _ = writeln!(
                out,
                "sensors {} {} {} {} {} {}",
                sc.rect.width(),
                sc.rect.height(),
                sc.delta,
                sc.range,
                join(sc.zones.cuts()),
                join(sc.zones.weights())
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: &str = "\
# four points on a line
pmpdc 4 4 2
0 1 2 10
1 0 1 9
2 1 0 8
10 9 8 0
3 3 3 3
";

    fn pmedian(text: &str) -> PMedianInstance {
        match parse_native(text).unwrap().body {
            NativeBody::PMedian(i) => i,
            other => panic!("unexpected {other:?}"),
        }
    }

    fn parse_err(text: &str) -> ParseError {
        match parse_native(text) {
            Err(Error::Parse(e)) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file() {
        let inst = pmedian("pmpdc 1 1 1\n0\n0\n");
        assert_eq!((inst.n_demand(), inst.n_sites(), inst.p()), (1, 1, 1));
    }

    #[test]
    fn line_instance_round_trip() {
        let inst = pmedian(L);
        assert_eq!(inst.distances().row(3), &[10.0, 9.0, 8.0, 0.0]);
        assert_eq!(inst.limits(), &[3.0; 4]);
        let text = to_native_string(&NativeFile::new(NativeBody::PMedian(inst.clone())));
        assert_eq!(pmedian(&text), inst);
    }

    #[test]
    fn limit_vector_length_names_line() {
        let e = parse_err("pmpdc 2 2 1\n0 1\n1 0\n3 3 3\n");
        assert_eq!(e.span.line, 4);
        assert!(e.message.contains("expected n = 2"), "{}", e.message);
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_err("pmdc 1 1 1\n0\n0\n").span.column, 1);
        assert_eq!(parse_err("pmpdc 1 1\n0\n0\n").span.line, 1);
        let e = parse_err("pmpdc 1 2 1\n0 -4\n0\n");
        assert_eq!((e.span.line, e.span.column), (2, 3));
        let e = parse_err("pmpdc 2 2 1\n0 1\n1\n0 0\n");
        assert_eq!(e.span.line, 3);
        let e = parse_err("approval 2 3 1\n101\n1x1\n");
        assert_eq!((e.span.line, e.span.column), (3, 2));
        let e = parse_err("approval 1 3 1\n1 0 2\n");
        assert_eq!((e.span.line, e.span.column), (2, 5));
        assert!(parse_err("pmpdc 1 1 1\n0\n")
            .message
            .contains("end of input"));
        assert!(matches!(parse_native(""), Err(Error::Parse(_))));
    }

    #[test]
    fn edge_list_completion() {
        let text = "pmpdc 3 3 1\nedges 2\n0 1 5\n1 2 7\n12 12 12\n";
        let inst = pmedian(text);
        assert_eq!(inst.distances().get(0, 2), 12.0);
        let disconnected = "pmpdc 3 3 1\nedges 1\n0 1 5\n1 1 1\n";
        assert!(matches!(
            parse_native(disconnected),
            Err(Error::Disconnected { from: 0, to: 2 })
        ));
    }

    #[test]
    fn approval_and_metadata() {
        let text = "@source hand-made\napproval 3 3 2\n111\n1 0 0\n000\n";
        let file = parse_native(text).unwrap();
        assert_eq!(file.metadata["source"], "hand-made");
        let NativeBody::Approval(prob) = &file.body else {
            panic!()
        };
        assert_eq!(prob.k(), 2);
        assert_eq!(prob.profile().row(1), &[true, false, false]);
        assert_eq!(parse_native(&to_native_string(&file)).unwrap(), file);
    }

    #[test]
    fn sensors_line() {
        let file = parse_native("sensors 3 1 0.01 3.5 1 2 1 2 2\n").unwrap();
        let NativeBody::Sensors(sc) = &file.body else {
            panic!()
        };
        assert_eq!(sc.zones.cuts(), &[1.0, 2.0]);
        assert_eq!(sc.zones.weights(), &[1.0, 2.0, 2.0]);
        assert_eq!(sc.range, 3.5);
        assert_eq!(parse_native(&to_native_string(&file)).unwrap(), file);
        assert!(matches!(
            parse_native("sensors 3 1 0.01 3.5 1 2 1 2\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_native("sensors 3 1 0.01 3.5 1 2 3 2 2\n"),
            Err(Error::Parse(_))
        ));
    }
}
