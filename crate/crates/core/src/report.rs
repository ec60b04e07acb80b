//! CSV solution reports and pairwise comparison of their rows.
//!
//! Columns: `row`, one `w_<class>` per class, then `v_<class>` (value
//! vector), then `p_<class>` (outcome probabilities), then `duplicate_of`,
//! which holds the first row with the same value vector or is empty. Rows
//! are numbered from 1 and numbers are written with six decimals.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::momdp::{pareto_dominates, ParetoFront, ValueVector};
use crate::order::{Dominance, PartialOrder};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub weight: Vec<f64>,
    pub value: Vec<f64>,
    pub outcomes: Vec<f64>,
    /// 1-based row this one repeats.
    pub duplicate_of: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub classes: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl SolutionReport {
    /// One row per weight, in the order given.
    pub fn from_front(classes: Vec<String>, front: &ParetoFront) -> Self {
        let rows = (0..front.weights.len())
            .map(|k| {
                let s = front.for_weight(k);
                ReportRow {
                    weight: front.weights[k].as_slice().to_vec(),
                    value: s.value.0.clone(),
                    outcomes: s.outcome_probs.clone(),
                    duplicate_of: front.duplicate_of(k).map(|j| j + 1),
                }
            })
            .collect();
        SolutionReport { classes, rows }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["row".to_string()];
        for prefix in ["w_", "v_", "p_"] {
            h.extend(self.classes.iter().map(|c| format!("{prefix}{c}")));
        }
        h.push("duplicate_of".into());
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(self.header()).map_err(csv_err)?;
        for (k, r) in self.rows.iter().enumerate() {
            let mut rec = vec![(k + 1).to_string()];
            for v in r.weight.iter().chain(&r.value).chain(&r.outcomes) {
                rec.push(format!("{v:.6}"));
            }
            rec.push(r.duplicate_of.map(|d| d.to_string()).unwrap_or_default());
            w.write_record(rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(input: R, origin: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse {
            path: origin.to_string(),
            message,
        };
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let cols = |prefix: &str| -> Vec<(usize, String)> {
            header
                .iter()
                .enumerate()
                .filter_map(|(i, h)| h.strip_prefix(prefix).map(|c| (i, c.to_string())))
                .collect()
        };
        let (w, v, p) = (cols("w_"), cols("v_"), cols("p_"));
        let classes: Vec<String> = v.iter().map(|(_, c)| c.clone()).collect();
        if classes.is_empty() {
            return Err(bad("header: no `v_` columns".into()));
        }
        for (name, set) in [("w_", &w), ("p_", &p)] {
            if !set.is_empty() && set.iter().map(|(_, c)| c).ne(classes.iter()) {
                return Err(bad(format!("header: `{name}` columns do not match the `v_` columns")));
            }
        }
        if p.is_empty() {
            return Err(bad("header: no `p_` columns".into()));
        }
        let dup = header.iter().position(|h| h == "duplicate_of");

        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let line = k + 2;
            let num = |i: usize| -> Result<f64> {
                let field = rec.get(i).unwrap_or("");
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("line {line}, column `{}`: not a number: `{field}`", header[i])))
            };
            let pick = |set: &[(usize, String)]| set.iter().map(|&(i, _)| num(i)).collect::<Result<Vec<_>>>();
            let duplicate_of = match dup.and_then(|i| rec.get(i)).map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(
                    s.parse::<usize>()
                        .map_err(|_| bad(format!("line {line}, column `duplicate_of`: `{s}`")))?,
                ),
            };
            rows.push(ReportRow {
                weight: pick(&w)?,
                value: pick(&v)?,
                outcomes: pick(&p)?,
                duplicate_of,
            });
        }
        Ok(SolutionReport { classes, rows })
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::read_csv(f, &path.display().to_string())
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// `pareto[i][j]`: Pareto verdict of row `i` against row `j`.
    pub pareto: Vec<Vec<Dominance>>,
    /// Weak-stochastic verdicts on the outcome columns, when a class order
    /// is available.
    pub stochastic: Option<Vec<Vec<Dominance>>>,
    /// Pairs of rows (0-based, `i < j`) with equal value vectors.
    pub equal_pairs: Vec<(usize, usize)>,
    /// Rows Pareto-dominated by another row.
    pub dominated_rows: Vec<usize>,
    /// Pairs where the two routes disagree.
    pub route_mismatches: usize,
}

impl ComparisonReport {
    pub fn is_mutually_nondominated(&self) -> bool {
        self.dominated_rows.is_empty()
    }
}

/// Pairwise comparison of report rows within tolerance `eps`.
pub fn compare_rows(report: &SolutionReport, order: Option<&PartialOrder>, eps: f64) -> Result<ComparisonReport> {
    let n = report.rows.len();
    let vv: Vec<ValueVector> = report.rows.iter().map(|r| ValueVector(r.value.clone())).collect();
    let mut pareto = vec![vec![Dominance::Neither; n]; n];
    let mut equal_pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            pareto[i][j] = pareto_dominates(&vv[i], &vv[j], eps)?;
            if i < j && vv[i].max_abs_diff(&vv[j]) <= eps {
                equal_pairs.push((i, j));
            }
        }
    }
    let stochastic = match order {
        None => None,
        Some(o) => {
            if o.len() != report.classes.len() {
                return Err(Error::DimensionMismatch {
                    expected: report.classes.len(),
                    got: o.len(),
                });
            }
            // Align the order's elements to the report's class columns.
            let perm = report
                .classes
                .iter()
                .map(|c| o.index_of(c))
                .collect::<Result<Vec<_>>>()?;
            let dense = |r: &ReportRow| {
                let mut d = vec![0.0; o.len()];
                for (k, &e) in perm.iter().enumerate() {
                    d[e] = r.outcomes[k];
                }
                d
            };
            let mut m = vec![vec![Dominance::Neither; n]; n];
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = o.dominance(&dense(&report.rows[i]), &dense(&report.rows[j]), eps)?;
                }
            }
            Some(m)
        }
    };
    let dominated_rows = (0..n)
        .filter(|&j| (0..n).any(|i| pareto[i][j] == Dominance::Dominates))
        .collect();
    let route_mismatches = stochastic.as_ref().map_or(0, |s| {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| s[i][j] != pareto[i][j])
            .count()
    });
    Ok(ComparisonReport {
        pareto,
        stochastic,
        equal_pairs,
        dominated_rows,
        route_mismatches,
    })
}

fn symbol(d: Dominance) -> char {
    match d {
        Dominance::Dominates => '>',
        Dominance::Dominated => '<',
        Dominance::Neither => '.',
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.pareto.len();
        let matrix = |f: &mut fmt::Formatter<'_>, title: &str, m: &[Vec<Dominance>]| -> fmt::Result {
            writeln!(f, "{title}")?;
            write!(f, "     ")?;
            for j in 0..n {
                write!(f, "{:>4}", j + 1)?;
            }
            writeln!(f)?;
            for (i, row) in m.iter().enumerate() {
                write!(f, "{:>4} ", i + 1)?;
                for (j, &d) in row.iter().enumerate() {
                    let c = if i == j { '-' } else { symbol(d) };
                    write!(f, "{c:>4}")?;
                }
                writeln!(f)?;
            }
            Ok(())
        };
        matrix(f, "Pareto dominance (row vs column):", &self.pareto)?;
        if let Some(s) = &self.stochastic {
            matrix(f, "weak-stochastic dominance (row vs column):", s)?;
            writeln!(f, "route mismatches: {}", self.route_mismatches)?;
        }
        for &(i, j) in &self.equal_pairs {
            writeln!(f, "rows {} and {} have equal value vectors (mutually non-strict)", i + 1, j + 1)?;
        }
        if self.dominated_rows.is_empty() {
            write!(f, "no row is dominated")
        } else {
            let rows: Vec<String> = self.dominated_rows.iter().map(|r| (r + 1).to_string()).collect();
            write!(f, "dominated rows: {}", rows.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(values: &[[f64; 2]]) -> SolutionReport {
        SolutionReport {
            classes: vec!["a".into(), "b".into()],
            rows: values
                .iter()
                .map(|v| ReportRow {
                    weight: vec![0.5, 0.5],
                    value: v.to_vec(),
                    outcomes: vec![v[0], 1.0 - v[0]],
                    duplicate_of: None,
                })
                .collect(),
        }
    }

    #[test]
    fn csv_round_trip_at_six_decimals() {
        let r = report(&[[0.25, 1.0], [0.5, 1.0]]);
        let text = r.to_csv_string();
        assert!(text.starts_with("row,w_a,w_b,v_a,v_b,p_a,p_b,duplicate_of\n1,0.500000,"));
        let back = SolutionReport::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn malformed_csv_names_the_column() {
        let text = "row,v_a,p_a\n1,0.5,x\n";
        let e = SolutionReport::read_csv(text.as_bytes(), "mem").unwrap_err();
        assert!(e.to_string().contains("p_a"), "{e}");
        assert!(SolutionReport::read_csv("row,x\n1,2\n".as_bytes(), "mem").is_err());
    }

    #[test]
    fn dominated_and_duplicate_rows_are_flagged() {
        let r = report(&[[0.5, 1.0], [0.4, 1.0], [0.3, 1.0], [0.3, 1.0]]);
        let c = compare_rows(&r, None, 1e-9).unwrap();
        assert_eq!(c.dominated_rows, vec![1, 2, 3]);
        assert_eq!(c.equal_pairs, vec![(2, 3)]);

        let r = report(&[[0.5, 1.0], [0.4, 1.0]]);
        let c = compare_rows(&r, None, 1e-9).unwrap();
        assert_eq!(c.dominated_rows, vec![1]);
        assert!(c.to_string().contains("dominated rows: 2"));
    }
}
