//! File writers. CSV floats carry 17 significant digits; JSON floats use the
//! shortest representation that parses back to the same value.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use flmc::diagnostics::{CurvePoint, WeakErrorRow};
use flmc::dynamics::Trajectory;
use serde::Serialize;

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output directory plus the names written so far, in write order.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
        body.push('\n');
        self.text(name, &body)
    }
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// `replica,step,time,f_value,x_0,...,x_{d−1}`, replicas in index order.
pub fn trajectories_csv(trajs: &[Trajectory], dim: usize) -> String {
    let mut s = String::from("replica,step,time,f_value");
    for i in 0..dim {
        let _ = write!(s, ",x_{i}");
    }
    s.push('\n');
    for t in trajs {
        for j in 0..t.steps.len() {
            let _ = write!(
                s,
                "{},{},{},{}",
                t.replica,
                t.steps[j],
                num(t.times[j]),
                num(t.f_values[j])
            );
            for x in &t.states[j] {
                let _ = write!(s, ",{}", num(*x));
            }
            s.push('\n');
        }
    }
    s
}

pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut s = String::from("step,mean_gap,ci_lo,ci_hi\n");
    for p in curve {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            p.step,
            num(p.mean_gap),
            num(p.ci_lo),
            num(p.ci_hi)
        );
    }
    s
}

pub fn weak_error_csv(rows: &[WeakErrorRow]) -> String {
    let mut s = String::from("eta,wq,ci_lo,ci_hi\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(r.eta),
            num(r.wq),
            num(r.ci_lo),
            num(r.ci_hi)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn trajectory_header() {
        let t = Trajectory {
            replica: 2,
            seed: 0,
            steps: vec![0],
            times: vec![0.0],
            states: vec![vec![1.0, 2.0]],
            f_values: vec![3.0],
        };
        let csv = trajectories_csv(&[t], 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("replica,step,time,f_value,x_0,x_1"));
        assert_eq!(lines.next().unwrap().split(',').count(), 6);
    }
}
