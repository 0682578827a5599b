//! Space descriptor mini-language and numeric expressions.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use lsl::spaces::{LengthSpace, MeshSurface, MetricGraph};

use crate::CliError;

/// Parses `1.5`, `pi`, `pi/2`, `2*pi`, `3pi/4` and similar products and quotients.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(CliError::config("empty number"));
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = s;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let f = factor(&rest[..end]).ok_or_else(|| CliError::config(format!("cannot parse number '{s}'")))?;
        if op == '*' {
            value *= f;
        } else {
            value /= f;
        }
        if end == rest.len() {
            break;
        }
        op = rest[end..].chars().next().unwrap_or('*');
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(CliError::config(format!("'{s}' is not a finite number")));
    }
    Ok(value)
}

fn factor(t: &str) -> Option<f64> {
    let t = t.trim();
    let lower = t.to_ascii_lowercase();
    if let Some(coef) = lower.strip_suffix("pi") {
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
        return Some(c * PI);
    }
    t.parse::<f64>().ok()
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_number).collect()
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {path}: {e}")))
}

/// Builds a space from its descriptor string.
///
/// Accepted forms: `circle:<d>`, `torus:<d1>,<d2>[,...]`, `sphere<n>`,
/// `graph:<path>`, `mesh:<path>`, `interval`, a bare `.json` path (graph or
/// mesh), and the generators `theta`, `doubled-square`, `cycle:<n>,<len>`,
/// `ellipsoid:<c>[,<rings>,<steiner>]`, `doubled-disk[:<rings>,<steiner>]`.
pub fn parse_space(desc: &str) -> Result<Arc<LengthSpace>, CliError> {
    let desc = desc.trim();
    let (head, arg) = match desc.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (desc, None),
    };
    let need = |what: &str| arg.ok_or_else(|| CliError::config(format!("space '{head}' needs {what}")));
    let space = match head {
        "circle" => LengthSpace::circle(parse_number(need("a diameter")?)?)?,
        "torus" => LengthSpace::torus(parse_list(need("factor diameters")?)?)?,
        "interval" => LengthSpace::interval(),
        "theta" => LengthSpace::MetricGraph(MetricGraph::theta()),
        "doubled-square" => LengthSpace::MetricGraph(MetricGraph::doubled_square()),
        "cycle" => {
            let v = parse_list(need("<n>,<len>")?)?;
            if v.len() != 2 || v[0] < 1.0 || v[0].fract() != 0.0 {
                return Err(CliError::config("cycle expects <n>,<len>"));
            }
            LengthSpace::MetricGraph(MetricGraph::cycle(v[0] as usize, v[1])?)
        }
        "graph" => LengthSpace::MetricGraph(MetricGraph::from_json_str(&read(need("a path")?)?)?),
        "mesh" => LengthSpace::MeshSurface(MeshSurface::from_json_str(&read(need("a path")?)?)?),
        "ellipsoid" => {
            let v = parse_list(need("<c>[,<rings>,<steiner>]")?)?;
            let (rings, steiner) = mesh_resolution(&v[1..])?;
            LengthSpace::MeshSurface(MeshSurface::ellipsoid(v[0], rings, steiner)?)
        }
        "doubled-disk" => {
            let v = match arg {
                Some(a) => parse_list(a)?,
                None => Vec::new(),
            };
            let (rings, steiner) = mesh_resolution(&v)?;
            LengthSpace::MeshSurface(MeshSurface::doubled_disk(rings, steiner)?)
        }
        _ if arg.is_none() && head.starts_with("sphere") => {
            let dim = head["sphere".len()..].parse::<usize>().map_err(|_| CliError::config(format!("bad sphere descriptor '{desc}'")))?;
            LengthSpace::sphere(dim)?
        }
        _ if desc.ends_with(".json") && Path::new(desc).exists() => {
            let text = read(desc)?;
            match MetricGraph::from_json_str(&text) {
                Ok(g) => LengthSpace::MetricGraph(g),
                Err(_) => LengthSpace::MeshSurface(MeshSurface::from_json_str(&text)?),
            }
        }
        _ => return Err(CliError::config(format!("unknown space descriptor '{desc}'"))),
    };
    Ok(Arc::new(space))
}

pub const DEFAULT_RINGS: usize = 6;
pub const DEFAULT_STEINER: usize = 3;

fn mesh_resolution(v: &[f64]) -> Result<(usize, usize), CliError> {
    match v {
        [] => Ok((DEFAULT_RINGS, DEFAULT_STEINER)),
        [r, s] if r.fract() == 0.0 && s.fract() == 0.0 && *r >= 1.0 && *s >= 0.0 => Ok((*r as usize, *s as usize)),
        _ => Err(CliError::config("mesh resolution expects <rings>,<steiner>")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1.5").unwrap(), 1.5);
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_number("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_number("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert!(parse_number("tau").is_err());
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("").is_err());
    }

    #[test]
    fn spaces() {
        assert_eq!(parse_space("circle:pi").unwrap().kind(), "circle");
        assert_eq!(parse_space("torus:pi,pi/2").unwrap().circumferences().unwrap(), vec![2.0 * PI, PI]);
        assert_eq!(parse_space("sphere2").unwrap().dimension(), 2);
        assert_eq!(parse_space("theta").unwrap().kind(), "graph");
        assert!(parse_space("circle").is_err());
        assert!(parse_space("circle:-1").is_err());
        assert!(parse_space("klein").is_err());
        assert!(parse_space("graph:/no/such/file.json").is_err());
    }
}
