use std::fmt;
use std::io::{self, Write};

use crate::benchmarks::FunctionId;
use crate::ddpg::Variant;
use crate::swarm::Schedule;

/// What chose the coefficients during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adapter {
    /// The variant's built-in coefficients.
    None,
    RlamAbsolute,
    RlamRelative,
    Schedule(Schedule),
}

impl Adapter {
    pub fn tag(self) -> &'static str {
        match self {
            Adapter::None => "none",
            Adapter::RlamAbsolute => "rlam-absolute",
            Adapter::RlamRelative => "rlam-relative",
            Adapter::Schedule(s) => s.name(),
        }
    }
}

impl fmt::Display for Adapter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One optimization run: the gbest trajectory sampled once per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub function: FunctionId,
    pub dim: usize,
    pub seed: u64,
    pub variant: Variant,
    pub adapter: Adapter,
    /// `(eval_count, gbest)` after initialization and after every iteration.
    pub curve: Vec<(usize, f64)>,
    pub final_fit: f64,
}

impl RunRecord {
    pub fn new(
        function: FunctionId,
        dim: usize,
        seed: u64,
        variant: Variant,
        adapter: Adapter,
        curve: Vec<(usize, f64)>,
    ) -> Self {
        let final_fit = curve.last().map_or(f64::NAN, |&(_, f)| f);
        RunRecord {
            function,
            dim,
            seed,
            variant,
            adapter,
            curve,
            final_fit,
        }
    }

    /// Writes the `eval_count,gbest` CSV.
    pub fn write_curve_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(b"eval_count,gbest\n")?;
        for (evals, fit) in &self.curve {
            writeln!(out, "{evals},{fit}")?;
        }
        Ok(())
    }

    pub fn curve_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_curve_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// Parses the `eval_count,gbest` CSV written by [`RunRecord::write_curve_csv`].
pub fn parse_curve_csv(text: &str) -> Result<Vec<(usize, f64)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some("eval_count,gbest") {
        return Err("missing `eval_count,gbest` header".into());
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let (e, f) = line
                .split_once(',')
                .ok_or_else(|| format!("line {}: expected two columns", n + 2))?;
            let e = e.parse().map_err(|_| format!("line {}: bad eval_count", n + 2))?;
            let f = f.parse().map_err(|_| format!("line {}: bad gbest", n + 2))?;
            Ok((e, f))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_csv_round_trips_exactly() {
        let rec = RunRecord::new(
            FunctionId::Sphere,
            10,
            1,
            Variant::Pso,
            Adapter::Schedule(Schedule::Constant),
            vec![(40, 1234.5678901234567), (80, 0.1 + 0.2), (120, -1399.9999999999998)],
        );
        let text = rec.curve_csv();
        assert!(text.starts_with("eval_count,gbest\n40,"));
        assert_eq!(parse_curve_csv(&text).unwrap(), rec.curve);
        assert_eq!(rec.final_fit, -1399.9999999999998);
    }
}
