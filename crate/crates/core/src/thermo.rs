//! Full-model thermodynamic curves shared by all ensembles.

use std::fmt;
use std::io::Write;

use crate::sector::fmt_opt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Micro,
    Canonical,
    Laplace,
}

impl Ensemble {
    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Micro => "micro",
            Ensemble::Canonical => "canonical",
            Ensemble::Laplace => "laplace",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a [`ThermoCurve`]. Per-atom quantities; `None` is "missing".
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThermoPoint {
    pub e_per_atom: f64,
    pub beta: Option<f64>,
    pub jz_per_atom: Option<f64>,
    pub jx_plus_per_atom: Option<f64>,
    pub jx_minus_per_atom: Option<f64>,
}

/// Tabulated `(E/N, β, J_z/N, J_x/N)` from one ensemble, ordered by `E/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoCurve {
    pub ensemble: Ensemble,
    /// `None` for the thermodynamic limit.
    pub n_atoms: Option<u64>,
    pub points: Vec<ThermoPoint>,
}

impl ThermoCurve {
    /// Builds a curve, sorting rows by energy.
    pub fn new(ensemble: Ensemble, n_atoms: Option<u64>, mut points: Vec<ThermoPoint>) -> Self {
        points.sort_by(|a, b| a.e_per_atom.total_cmp(&b.e_per_atom));
        ThermoCurve {
            ensemble,
            n_atoms,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "E_per_N,beta,jz_per_N,jx_plus_per_N,jx_minus_per_N,ensemble")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.e_per_atom,
                fmt_opt(p.beta),
                fmt_opt(p.jz_per_atom),
                fmt_opt(p.jx_plus_per_atom),
                fmt_opt(p.jx_minus_per_atom),
                self.ensemble,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_serialized() {
        let pts = vec![
            ThermoPoint {
                e_per_atom: 0.5,
                beta: Some(0.0),
                ..Default::default()
            },
            ThermoPoint {
                e_per_atom: -1.0,
                beta: Some(1.25),
                jz_per_atom: Some(-0.05),
                jx_plus_per_atom: Some(0.3),
                jx_minus_per_atom: Some(-0.3),
            },
        ];
        let c = ThermoCurve::new(Ensemble::Micro, Some(10), pts);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "E_per_N,beta,jz_per_N,jx_plus_per_N,jx_minus_per_N,ensemble"
        );
        assert_eq!(lines[1], "-1,1.25,-0.05,0.3,-0.3,micro");
        assert_eq!(lines[2], "0.5,0,nan,nan,nan,micro");
    }
}
