//! OR-Library `pmed` files: an undirected weighted graph whose shortest-path
//! matrix gives the distances, with every vertex both a demand point and a
//! candidate site.

use crate::error::{Error, ParseError, Result};
use crate::pmedian::PMedianInstance;
use crate::primitives::DistanceMatrix;

/// How distance limits are derived, since the files carry none:
/// `s_i = beta * (q-th smallest entry of row i)`, counting the zero self-distance,
/// so `q = 2` is the distance to the nearest other vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRule {
    pub beta: f64,
    pub q: usize,
}

impl CoverageRule {
    /// `beta = 1.1`, `q = ceil(m / 10)`.
    pub fn default_for(m: usize) -> Self {
        Self {
            beta: 1.1,
            q: m.div_ceil(10).max(1),
        }
    }

    pub fn limits(&self, dm: &DistanceMatrix) -> Result<Vec<f64>> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Parameter(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.q == 0 || self.q > dm.n_sites() {
            return Err(Error::Parameter(format!(
                "q must lie in 1..={}, got {}",
                dm.n_sites(),
                self.q
            )));
        }
        Ok(dm
            .rows()
            .map(|row| {
                let mut sorted = row.to_vec();
                sorted.sort_by(f64::total_cmp);
                self.beta * sorted[self.q - 1]
            })
            .collect())
    }
}

/// All-pairs shortest paths over `n` vertices (0-based edges), Floyd–Warshall.
/// A repeated edge replaces the earlier one.
pub fn shortest_paths(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<Vec<f64>>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if u != v {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        let dk = d[k].clone();
        for row in d.iter_mut() {
            let dik = row[k];
            if dik.is_infinite() {
                continue;
            }
            for (dij, &dkj) in row.iter_mut().zip(&dk) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    for (i, row) in d.iter().enumerate() {
        if let Some(j) = row.iter().position(|x| x.is_infinite()) {
            return Err(Error::Disconnected { from: i, to: j });
        }
    }
    Ok(d)
}

/// Parses a `pmed` file: a line `n_vertices n_edges p`, then one line
/// `u v w` per edge with 1-based vertices. Disconnected pairs are reported
/// with 1-based vertex numbers.
pub fn parse_orlib_pmedian(text: &str, rule: Option<CoverageRule>) -> Result<PMedianInstance> {
    let mut nums = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut col = 0;
        for tok in line.split_whitespace() {
            let offset = line[col..].find(tok).expect("token from this line") + col;
            col = offset + tok.len();
            nums.push((tok, li + 1, offset + 1));
        }
    }
    let mut it = nums.into_iter();
    let mut next_int = |what: &str| -> Result<(usize, usize, usize)> {
        let (tok, line, column) = it.next().ok_or_else(|| {
            Error::from(ParseError::new(
                text.lines().count().max(1),
                1,
                format!("unexpected end of input, expected {what}"),
            ))
        })?;
        tok.parse::<usize>()
            .map(|v| (v, line, column))
            .map_err(|_| {
                ParseError::new(line, column, format!("expected {what}, found {tok:?}")).into()
            })
    };
    let (n, _, _) = next_int("the vertex count")?;
    let (e, _, _) = next_int("the edge count")?;
    let (p, pl, pc) = next_int("p")?;
    if n == 0 {
        return Err(ParseError::new(1, 1, "vertex count must be positive").into());
    }
    if p == 0 || p > n {
        return Err(ParseError::new(pl, pc, format!("p must lie in 1..={n}")).into());
    }
    let mut edges = Vec::with_capacity(e);
    for _ in 0..e {
        let mut ends = [0usize; 2];
        for end in &mut ends {
            let (v, line, column) = next_int("a vertex number")?;
            if v == 0 || v > n {
                return Err(ParseError::new(
                    line,
                    column,
                    format!("vertex {v} out of range 1..={n}"),
                )
                .into());
            }
            *end = v - 1;
        }
        let (w, _, _) = next_int("an edge weight")?;
        edges.push((ends[0], ends[1], w as f64));
    }
    let d = shortest_paths(n, &edges).map_err(|e| match e {
        Error::Disconnected { from, to } => Error::Disconnected {
            from: from + 1,
            to: to + 1,
        },
        other => other,
    })?;
    let dm = DistanceMatrix::from_rows(&d)?;
    let s = rule
        .unwrap_or_else(|| CoverageRule::default_for(n))
        .limits(&dm)?;
    PMedianInstance::new(dm, p, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph() {
        // path 1-2-3-4 with a shortcut 1-4
        let text = "4 4 2\n1 2 3\n2 3 4\n3 4 5\n1 4 6\n";
        let inst = parse_orlib_pmedian(text, Some(CoverageRule { beta: 1.0, q: 2 })).unwrap();
        let dm = inst.distances();
        assert_eq!(dm.row(0), &[0.0, 3.0, 7.0, 6.0]);
        assert_eq!(dm.row(2), &[7.0, 4.0, 0.0, 5.0]);
        assert_eq!(inst.limits(), &[3.0, 3.0, 4.0, 5.0]);
        assert_eq!(inst.p(), 2);
    }

    #[test]
    fn repeated_edge_last_wins() {
        let inst = parse_orlib_pmedian("2 2 1\n1 2 9\n2 1 4\n", None).unwrap();
        assert_eq!(inst.distances().get(0, 1), 4.0);
        // q = ceil(2/10) = 1 picks the self-distance
        assert_eq!(inst.limits(), &[0.0, 0.0]);
    }

    #[test]
    fn disconnected_names_pair() {
        assert!(matches!(
            parse_orlib_pmedian("3 1 1\n1 2 1\n", None),
            Err(Error::Disconnected { from: 1, to: 3 })
        ));
    }

    #[test]
    fn malformed() {
        assert!(
            matches!(parse_orlib_pmedian("3 1 1\n1 5 1\n", None), Err(Error::Parse(e)) if e.span.line == 2 && e.span.column == 3)
        );
        assert!(matches!(
            parse_orlib_pmedian("3 2 1\n1 2 1\n", None),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_orlib_pmedian("2 1 3\n1 2 1\n", None),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn default_rule() {
        assert_eq!(CoverageRule::default_for(100).q, 10);
        assert_eq!(CoverageRule::default_for(101).q, 11);
        assert_eq!(CoverageRule::default_for(3).q, 1);
    }
}
