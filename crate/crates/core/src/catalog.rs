//! Closed-form states: genuine quantum states and the tomogram-like
//! counterexamples, each evaluable exactly in the representations it has.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::hermite::{hermite_functions, laguerre};

/// Which function of a state is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// `W(q, p)`
    Wigner,
    /// `w(X, theta)`
    Optical,
    /// `M(X, mu, nu)`
    Symplectic,
}

impl Representation {
    pub fn arity(self) -> usize {
        match self {
            Representation::Wigner | Representation::Optical => 2,
            Representation::Symplectic => 3,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Wigner => "wigner",
            Representation::Optical => "optical",
            Representation::Symplectic => "symplectic",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wigner" => Ok(Representation::Wigner),
            "optical" => Ok(Representation::Optical),
            "symplectic" => Ok(Representation::Symplectic),
            other => Err(Error::InvalidParameter(format!("unknown representation `{other}`"))),
        }
    }
}

/// Squeezing parameter giving `Var q = 1/4`, `Var p = 1`.
pub const DEFAULT_SQUEEZING: f64 = 0.346_573_590_279_972_65; // ln(2)/2

/// Entries of the closed-form state catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    /// Number state `|n>`, `n <= 5`; `Fock(0)` is the oscillator ground state.
    Fock(usize),
    /// Coherent state centred at `(q0, p0)`.
    Coherent { q0: f64, p0: f64 },
    /// Squeezed vacuum, `Var q = e^{-2r}/2`.
    Squeezed { r: f64 },
    /// `pi^{-1/2} exp(-(X - cos^3 theta)^2)`: positive, normalized, even and
    /// Hirschman-compliant, yet outside the Radon range.
    ExampleCos3,
    /// `e^{1/4} pi^{-1/2} exp(-X^2 - mu^2/4 - nu^2/4)`: passes the KLM
    /// conditions but is not a Radon fixed point.
    F1,
    /// `pi^{-1/2} e^{-X^2} (X^4 + X^2/4 + 1/8)`: conserves normalization but
    /// has `rho_00 = -1/8`.
    W1,
    /// Phase-space preimage of [`State::W1`]; negative near the origin.
    W1Quartic,
    /// Symplectic image of [`State::W1`].
    M1,
}

pub const GROUND: State = State::Fock(0);

impl State {
    /// Every catalog entry with default parameters.
    pub fn all() -> Vec<State> {
        let mut v: Vec<State> = (0..=5).map(State::Fock).collect();
        v.push(State::Coherent { q0: 1.0, p0: 0.0 });
        v.push(State::Squeezed { r: DEFAULT_SQUEEZING });
        v.extend([State::ExampleCos3, State::F1, State::W1, State::W1Quartic, State::M1]);
        v
    }

    pub fn name(&self) -> String {
        match self {
            State::Fock(0) => "ground".into(),
            State::Fock(n) => format!("fock{n}"),
            State::Coherent { q0, p0 } => format!("coherent:q0={q0},p0={p0}"),
            State::Squeezed { r } => format!("squeezed:r={r}"),
            State::ExampleCos3 => "example-cos3".into(),
            State::F1 => "f1".into(),
            State::W1 => "w1".into(),
            State::W1Quartic => "W1-quartic".into(),
            State::M1 => "M1".into(),
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            State::Fock(0) => "oscillator ground state",
            State::Fock(_) => "number state",
            State::Coherent { .. } => "coherent (displaced ground) state",
            State::Squeezed { .. } => "squeezed vacuum",
            State::ExampleCos3 => "pi^{-1/2} exp(-(X - cos^3 theta)^2); not a tomogram",
            State::F1 => "e^{1/4} pi^{-1/2} exp(-X^2 - mu^2/4 - nu^2/4); KLM-positive, not a tomogram",
            State::W1 => "pi^{-1/2} e^{-X^2}(X^4 + X^2/4 + 1/8); conserves normalization, not a tomogram",
            State::W1Quartic => "phase-space preimage of w1; negative at the origin",
            State::M1 => "symplectic image of w1; not a tomogram",
        }
    }

    /// True for the functions that are not tomograms of any state.
    pub fn is_counterexample(&self) -> bool {
        matches!(self, State::ExampleCos3 | State::F1 | State::W1 | State::W1Quartic | State::M1)
    }

    pub fn representations(&self) -> &'static [Representation] {
        use Representation::*;
        match self {
            State::Fock(_) | State::Coherent { .. } | State::Squeezed { .. } => &[Wigner, Optical, Symplectic],
            State::ExampleCos3 | State::W1 => &[Optical, Symplectic],
            State::W1Quartic => &[Wigner, Optical],
            State::F1 | State::M1 => &[Symplectic],
        }
    }

    pub fn has(&self, repr: Representation) -> bool {
        self.representations().contains(&repr)
    }

    fn unavailable(&self, repr: Representation) -> Error {
        Error::RepresentationUnavailable { state: self.name(), repr: repr.to_string() }
    }

    /// `W(q, p)`.
    pub fn wigner(&self, q: f64, p: f64) -> Result<f64> {
        let r2 = q * q + p * p;
        Ok(match *self {
            State::Fock(n) => {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign / PI * (-r2).exp() * laguerre(n, 0.0, 2.0 * r2)
            }
            State::Coherent { q0, p0 } => (-(q - q0).powi(2) - (p - p0).powi(2)).exp() / PI,
            State::Squeezed { r } => {
                let s = (2.0 * r).exp();
                (-q * q * s - p * p / s).exp() / PI
            }
            State::W1Quartic => (-r2).exp() / PI * (r2 * r2 - 0.75 * r2 - 0.25),
            _ => return Err(self.unavailable(Representation::Wigner)),
        })
    }

    /// `w(X, theta)`.
    pub fn optical(&self, x: f64, theta: f64) -> Result<f64> {
        let gauss = |y: f64| (-y * y).exp() / PI.sqrt();
        Ok(match *self {
            State::Fock(n) => {
                let psi = hermite_functions(n, x);
                psi[n] * psi[n]
            }
            State::Coherent { q0, p0 } => gauss(x - q0 * theta.cos() - p0 * theta.sin()),
            State::Squeezed { r } => {
                let (s, c) = theta.sin_cos();
                let var = 0.5 * ((-2.0 * r).exp() * c * c + (2.0 * r).exp() * s * s);
                normal_density(x, var)
            }
            State::ExampleCos3 => gauss(x - theta.cos().powi(3)),
            State::W1 | State::W1Quartic => gauss(x) * (x.powi(4) + x * x / 4.0 + 0.125),
            _ => return Err(self.unavailable(Representation::Optical)),
        })
    }

    /// `M(X, mu, nu)`. For homogeneous entries `(mu, nu) = (0, 0)` is the
    /// delta-function limit and is rejected; `f1` is smooth there.
    pub fn symplectic(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        let r2 = mu * mu + nu * nu;
        if let State::F1 = self {
            return Ok((0.25f64).exp() / PI.sqrt() * (-x * x - r2 / 4.0).exp());
        }
        if r2 == 0.0 {
            return Err(Error::OriginPoint { mu, nu });
        }
        let r = r2.sqrt();
        Ok(match *self {
            State::Fock(n) => {
                let psi = hermite_functions(n, x / r);
                psi[n] * psi[n] / r
            }
            State::Coherent { q0, p0 } => {
                (-(x - q0 * mu - p0 * nu).powi(2) / r2).exp() / (PI.sqrt() * r)
            }
            State::Squeezed { r: sq } => {
                let var = 0.5 * ((-2.0 * sq).exp() * mu * mu + (2.0 * sq).exp() * nu * nu);
                normal_density(x, var)
            }
            State::M1 | State::W1 => {
                let y2 = x * x / r2;
                (y2 * y2 + y2 / 4.0 + 0.125) * (-y2).exp() / (PI.sqrt() * r)
            }
            State::ExampleCos3 => {
                let (s, theta) = polar_branch(mu, nu);
                let y = s * x / r;
                (-(y - theta.cos().powi(3)).powi(2)).exp() / (PI.sqrt() * r)
            }
            State::W1Quartic | State::F1 => return Err(self.unavailable(Representation::Symplectic)),
        })
    }

    /// Evaluates a representation at a point of matching arity:
    /// `(q, p)`, `(X, theta)` or `(X, mu, nu)`.
    pub fn eval(&self, repr: Representation, point: &[f64]) -> Result<f64> {
        if point.len() != repr.arity() {
            return Err(Error::PointArity { repr: repr.to_string(), expected: repr.arity(), got: point.len() });
        }
        if !self.has(repr) {
            return Err(self.unavailable(repr));
        }
        match repr {
            Representation::Wigner => self.wigner(point[0], point[1]),
            Representation::Optical => self.optical(point[0], point[1]),
            Representation::Symplectic => self.symplectic(point[0], point[1], point[2]),
        }
    }

    /// True when `M(lambda X, lambda mu, lambda nu) = |lambda|^{-1} M` holds
    /// identically for the closed form.
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, State::F1)
    }

    /// Fock-basis coefficients when the state lies in the Hermite class.
    pub fn fock_matrix(&self, n_max: usize) -> Option<FockMatrix> {
        match *self {
            State::Fock(n) => Some(FockMatrix::number(n, n_max.max(n))),
            State::Coherent { q0, p0 } => Some(FockMatrix::coherent(q0, p0, n_max)),
            State::Squeezed { r } => Some(FockMatrix::squeezed_vacuum(r, n_max)),
            State::W1 | State::W1Quartic | State::M1 => {
                Some(FockMatrix::from_diagonal(&[-0.125, 0.625, 0.5]).resized(n_max.max(2)))
            }
            State::ExampleCos3 | State::F1 => None,
        }
    }
}

/// Normal density with zero mean.
fn normal_density(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Maps `(mu, nu) != 0` to `(sign, theta)` with `theta in [0, pi)` such that
/// `(mu, nu) = sign * r * (cos theta, sin theta)`. On `nu = 0` the sign is
/// positive for `mu > 0`.
pub fn polar_branch(mu: f64, nu: f64) -> (f64, f64) {
    if nu > 0.0 || (nu == 0.0 && mu > 0.0) {
        (1.0, nu.atan2(mu))
    } else {
        (-1.0, (-nu).atan2(-mu))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn parse_params(body: &str) -> Result<Vec<(String, f64)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("not a number: `{v}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

impl FromStr for State {
    type Err = Error;

    /// Names: `ground`, `fock0`..`fock5`, `coherent[:q0=..,p0=..]`,
    /// `squeezed[:r=..]`, `example-cos3`, `f1`, `w1`, `W1-quartic`, `M1`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, params) = match s.split_once(':') {
            Some((h, p)) => (h, parse_params(p)?),
            None => (s, Vec::new()),
        };
        let get = |key: &str, default: f64| -> Result<f64> {
            let mut value = default;
            for (k, v) in &params {
                if k == key {
                    value = *v;
                } else if !matches!(k.as_str(), "q0" | "p0" | "r") {
                    return Err(Error::InvalidParameter(format!("unknown parameter `{k}` for `{head}`")));
                }
            }
            Ok(value)
        };
        let state = match head {
            "ground" => State::Fock(0),
            "coherent" => State::Coherent { q0: get("q0", 1.0)?, p0: get("p0", 0.0)? },
            "squeezed" => State::Squeezed { r: get("r", DEFAULT_SQUEEZING)? },
            "example-cos3" => State::ExampleCos3,
            "f1" => State::F1,
            "w1" => State::W1,
            "W1-quartic" => State::W1Quartic,
            "M1" => State::M1,
            other => match other.strip_prefix("fock").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n <= 5 => State::Fock(n),
                _ => return Err(Error::UnknownState(s.to_string())),
            },
        };
        if !params.is_empty() && !matches!(state, State::Coherent { .. } | State::Squeezed { .. }) {
            return Err(Error::InvalidParameter(format!("`{head}` takes no parameters")));
        }
        Ok(state)
    }
}

/// A catalog entry or a grid file on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Catalog(State),
    /// Path to a grid manifest (JSON) in the shared grid file format.
    GridFile(PathBuf),
}

impl FromStr for StateSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(StateSpec::GridFile(PathBuf::from(path)));
        }
        if s.ends_with(".json") {
            return Ok(StateSpec::GridFile(PathBuf::from(s)));
        }
        s.parse().map(StateSpec::Catalog)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Catalog(s) => write!(f, "{s}"),
            StateSpec::GridFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Exact evaluation of a catalog entry; grid files are not closed forms and
/// are rejected here (load them through [`crate::io`]).
pub fn catalog_eval(spec: &StateSpec, repr: Representation, point: &[f64]) -> Result<f64> {
    match spec {
        StateSpec::Catalog(state) => state.eval(repr, point),
        StateSpec::GridFile(p) => Err(Error::InvalidParameter(format!(
            "{} is a sampled grid, not a closed form",
            p.display()
        ))),
    }
}
