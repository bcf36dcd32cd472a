use jacobi_pe::symbols::parse_complex;
use jacobi_pe::{ComplexGrid, NormKind, SymbolTriple, C64};

use crate::CliError;

pub fn triple(s: &str) -> Result<SymbolTriple, CliError> {
    SymbolTriple::parse(s).map_err(CliError::from)
}

pub fn complex(s: &str) -> Result<C64, CliError> {
    parse_complex(s).map_err(CliError::from)
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::parse(format!("bad number `{}` in {what}", x.trim())))
        })
        .collect()
}

fn count(s: &str, what: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::parse(format!("bad integer `{}` in {what}", s.trim())))
}

/// `x0,x1,y0,y1` and `N` or `NX,NY`.
pub fn grid(window: &str, res: &str) -> Result<ComplexGrid, CliError> {
    let w = floats(window, "--window")?;
    let [x0, x1, y0, y1] = w[..] else {
        return Err(CliError::parse("--window takes x0,x1,y0,y1".into()));
    };
    let (nx, ny) = match res.split_once(',') {
        Some((a, b)) => (count(a, "--res")?, count(b, "--res")?),
        None => {
            let n = count(res, "--res")?;
            (n, n)
        }
    };
    ComplexGrid::new(x0, x1, y0, y1, nx, ny).map_err(CliError::from)
}

/// `a..b:step` (arithmetic), `a..b` (doubling from `a`, capped at `b`), or a
/// comma list.
pub fn sizes(s: &str) -> Result<Vec<usize>, CliError> {
    let out = if let Some((a, rest)) = s.split_once("..") {
        let a = count(a, "--sizes")?;
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (count(b, "--sizes")?, Some(count(st, "--sizes")?)),
            None => (count(rest, "--sizes")?, None),
        };
        if a == 0 || a > b || step == Some(0) {
            return Err(CliError::parse(format!("--sizes `{s}` is empty or starts at 0")));
        }
        match step {
            Some(st) => (a..=b).step_by(st).collect(),
            None => {
                let mut v = Vec::new();
                let mut n = a;
                while n < b {
                    v.push(n);
                    n *= 2;
                }
                v.push(b);
                v
            }
        }
    } else {
        s.split(',').map(|x| count(x, "--sizes")).collect::<Result<Vec<_>, _>>()?
    };
    if out.is_empty() || out[0] == 0 || out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::parse(format!("--sizes `{s}` must be positive and increasing")));
    }
    Ok(out)
}

pub fn eps_list(s: &str) -> Result<Vec<f64>, CliError> {
    let v = floats(s, "--eps")?;
    if v.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(CliError::parse("--eps values must be positive".into()));
    }
    Ok(v)
}

pub fn norm(s: &str) -> Result<NormKind, CliError> {
    s.parse().map_err(CliError::from)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftArg {
    Auto,
    Fixed(i8),
}

pub fn shift(s: &str) -> Result<ShiftArg, CliError> {
    match s.trim() {
        "auto" => Ok(ShiftArg::Auto),
        "0" | "+0" | "-0" => Ok(ShiftArg::Fixed(0)),
        "1" | "+1" => Ok(ShiftArg::Fixed(1)),
        "-1" => Ok(ShiftArg::Fixed(-1)),
        other => Err(CliError::parse(format!("--shift takes auto, 0, +1 or -1, got `{other}`"))),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub raster: bool,
    pub json: bool,
}

/// Comma list of `csv`, `ppm` (any raster), `json`.
pub fn formats(s: &str) -> Result<Formats, CliError> {
    let mut f = Formats::default();
    for part in s.split(',').map(str::trim) {
        match part {
            "csv" => f.csv = true,
            "ppm" | "pgm" | "pbm" | "raster" => f.raster = true,
            "json" => f.json = true,
            other => return Err(CliError::parse(format!("unknown format `{other}`"))),
        }
    }
    Ok(f)
}
