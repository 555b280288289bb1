//! Text format for systems:
//!
//! ```text
//! states: s p
//! inputs: p
//! outputs: p
//! x0: 0 0        # optional, zeros by default
//! A:
//! 0.5 0.5
//! 1 inf
//! B:
//! 0.5
//! inf
//! C:
//! inf 0
//! ```

use std::fmt;

use super::system::{tokens, SystemDyn};
use super::ComposeError;
use crate::hybrid::{HybridMatrix, RowKind};
use crate::scalar::ExtendedReal;

#[derive(Clone, Copy, PartialEq)]
enum Section {
    A,
    B,
    C,
}

fn parse_values(line: &str, n: usize) -> Result<Vec<ExtendedReal>, ComposeError> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<ExtendedReal>().map_err(|e| ComposeError::Parse {
                line: n,
                msg: e.to_string(),
            })
        })
        .collect()
}

impl SystemDyn {
    pub fn parse_text(text: &str) -> Result<Self, ComposeError> {
        let mut states = None;
        let mut inputs = None;
        let mut outputs = None;
        let mut x0 = None;
        let mut section = None;
        let mut rows: [Vec<Vec<ExtendedReal>>; 3] = Default::default();
        for (idx, raw) in text.lines().enumerate() {
            let n = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| ComposeError::Parse { line: n, msg };
            if let Some((key, rest)) = line.split_once(':') {
                let kinds = || {
                    rest.split_whitespace()
                        .map(|t| RowKind::parse(t).ok_or_else(|| perr(format!("bad kind `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()
                };
                match key.trim() {
                    "states" => states = Some(kinds()?),
                    "inputs" => inputs = Some(kinds()?),
                    "outputs" => outputs = Some(kinds()?),
                    "x0" => x0 = Some(parse_values(rest, n)?),
                    "A" | "B" | "C" if !rest.trim().is_empty() => {
                        return Err(perr("block header must stand alone".into()))
                    }
                    "A" => section = Some(Section::A),
                    "B" => section = Some(Section::B),
                    "C" => section = Some(Section::C),
                    other => return Err(perr(format!("unknown header `{other}`"))),
                }
                continue;
            }
            let s = section.ok_or_else(|| perr("entries before any block header".into()))?;
            rows[s as usize].push(parse_values(line, n)?);
        }
        let missing = |what: &str| ComposeError::Parse {
            line: 0,
            msg: format!("missing `{what}:` header"),
        };
        let states = states.ok_or_else(|| missing("states"))?;
        let inputs = inputs.ok_or_else(|| missing("inputs"))?;
        let outputs = outputs.ok_or_else(|| missing("outputs"))?;
        let [mut ra, mut rb, mut rc] = rows;
        // zero-column blocks have no visible rows
        for (r, n, cols) in [(&mut ra, states.len(), states.len()), (&mut rb, states.len(), inputs.len()), (&mut rc, outputs.len(), states.len())] {
            if cols == 0 && r.is_empty() {
                *r = vec![vec![]; n];
            }
        }
        let a = HybridMatrix::from_rows(states.clone(), states.clone(), ra)?;
        let b = HybridMatrix::from_rows(states.clone(), inputs, rb)?;
        let c = HybridMatrix::from_rows(outputs, states.clone(), rc)?;
        match x0 {
            Some(x0) => Self::with_initial(a, b, c, x0),
            None => Self::new(a, b, c),
        }
    }
}

impl fmt::Display for SystemDyn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |v: &[ExtendedReal]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "states: {}", tokens(self.state_kinds()))?;
        writeln!(f, "inputs: {}", tokens(self.input_kinds()))?;
        writeln!(f, "outputs: {}", tokens(self.output_kinds()))?;
        writeln!(f, "x0: {}", line(self.x0()))?;
        for (name, m) in [("A", self.a()), ("B", self.b()), ("C", self.c())] {
            writeln!(f, "{name}:")?;
            for i in 0..m.rows() {
                writeln!(f, "{}", line(m.row(i)))?;
            }
        }
        Ok(())
    }
}
