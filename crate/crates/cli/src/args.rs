use clap::{Parser, Subcommand, ValueEnum};
use fingap_core::{Complex64 as C, CouplingVector};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "fingap", version, about = "Finite-gap spectral data for the four-coupling elliptic Schrodinger operator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Coefficients of the doubly periodic product Xi(x, E).
    Xi(Common),
    /// Q(E), Q1(E) and the roots of Q.
    Curve(Common),
    /// Residuals of [H, A] = 0 and A^2 + Q(H) = 0, plus the determinant check.
    OperatorCheck(Common),
    /// Monodromy multipliers along 1 and tau at E, by both methods.
    Monodromy(Common),
    /// Gap edges of the real operator.
    Bands(Common),
    /// Continue the m-th boundary value eigenvalue along a path in the nome.
    EigenContinue(Common),
    /// Heun parameters at E and the cycle monodromy.
    Heun(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Xi(_) => "xi",
            Command::Curve(_) => "curve",
            Command::OperatorCheck(_) => "operator-check",
            Command::Monodromy(_) => "monodromy",
            Command::Bands(_) => "bands",
            Command::EigenContinue(_) => "eigen-continue",
            Command::Heun(_) => "heun",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Xi(c)
            | Command::Curve(c)
            | Command::OperatorCheck(c)
            | Command::Monodromy(c)
            | Command::Bands(c)
            | Command::EigenContinue(c)
            | Command::Heun(c) => c,
        }
    }
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct Common {
    /// Couplings l0,l1,l2,l3; negative entries are replaced by -l-1.
    #[arg(long = "l", value_parser = parse_couplings, allow_hyphen_values = true)]
    pub l: CouplingVector,
    /// Period ratio, e.g. 0+2i, 2i or 0.3+1.4i.
    #[arg(long, value_parser = parse_tau, allow_hyphen_values = true)]
    pub tau: Option<C>,
    /// Energy, e.g. 3, -1.5+0.2i.
    #[arg(long = "E", value_parser = parse_complex, allow_hyphen_values = true)]
    pub e: Option<C>,
    /// Eigenvalue index.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Nome path start:end:steps; start and end may be complex.
    #[arg(long = "p-path", value_parser = parse_p_path, allow_hyphen_values = true)]
    pub p_path: Option<PPath>,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Pass threshold for checks.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn parse_couplings(s: &str) -> Result<CouplingVector, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated integers, got {s:?}"));
    }
    let mut raw = [0i64; 4];
    for (r, p) in raw.iter_mut().zip(&parts) {
        *r = p.parse().map_err(|_| format!("{p:?} is not an integer"))?;
    }
    CouplingVector::new(raw).map_err(|e| e.to_string())
}

/// Parses a+bi, a-bi, bi, a, with optional spaces.
pub fn parse_complex(s: &str) -> Result<C, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {s:?} as a complex number (use forms like 1.5, 2i, 0.3+1.4i)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    // the sign that starts the imaginary part: last +/- not leading and not in an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |v: &str| -> Result<f64, String> {
        match v {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => v.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(C::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C::new(0.0, imag(body)?)),
    }
}

pub fn parse_tau(s: &str) -> Result<C, String> {
    let tau = parse_complex(s)?;
    if !(tau.im > 0.0) {
        return Err(format!("tau must have positive imaginary part, got {s:?}"));
    }
    Ok(tau)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PPath(pub Vec<C>);

pub fn parse_p_path(s: &str) -> Result<PPath, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:end:steps, got {s:?}"));
    }
    let a = parse_complex(parts[0])?;
    let b = parse_complex(parts[1])?;
    let n: usize = parts[2].trim().parse().map_err(|_| format!("{:?} is not a step count", parts[2]))?;
    if n == 0 {
        return Err("the path needs at least one step".into());
    }
    if a.norm() >= 1.0 || b.norm() >= 1.0 {
        return Err(format!("nome values must satisfy |p| < 1, got {s:?}"));
    }
    Ok(PPath((0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0+2i").unwrap(), C::new(0.0, 2.0));
        assert_eq!(parse_complex("2i").unwrap(), C::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex("1.5").unwrap(), C::new(1.5, 0.0));
        assert_eq!(parse_complex("-0.3-1.4i").unwrap(), C::new(-0.3, -1.4));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), C::new(1e-3, 20.0));
        assert_eq!(parse_complex(" 1 + 2 i ").unwrap(), C::new(1.0, 2.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn tau_must_be_in_the_upper_half_plane() {
        assert!(parse_tau("1").is_err());
        assert!(parse_tau("0-2i").is_err());
        assert!(parse_tau("1+2i").is_ok());
    }

    #[test]
    fn couplings_normalize() {
        let l = parse_couplings("-1,0,0,1").unwrap();
        assert_eq!(l.l, [0, 0, 0, 1]);
        assert!(l.normalized);
        assert!(parse_couplings("0,0,0,0").is_err());
        assert!(parse_couplings("-1,0,0,-1").is_err());
        assert!(parse_couplings("1,2,3").is_err());
    }

    #[test]
    fn p_path_endpoints() {
        let p = parse_p_path("0:0.1:4").unwrap().0;
        assert_eq!(p.len(), 5);
        assert!((p[4] - C::new(0.1, 0.0)).norm() < 1e-15);
        assert!(parse_p_path("0:1:3").is_err());
        assert!(parse_p_path("0:0.1:0").is_err());
    }
}
