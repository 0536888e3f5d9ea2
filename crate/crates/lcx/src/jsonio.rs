use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::gallery::{GalleryFunction, PointFunction};
use crate::grid::{Grid, Norm};
use crate::sampled::SampledFunction;
use crate::serde_util::{f64_from_json, f64_to_json};

/// Grid wire format:
/// `{"dim":1,"lower":[-1],"upper":[1],"nodes":[101],"norm":2}`
/// with "norm" one of 1, 2 or "inf".
pub fn grid_to_json(g: &Grid) -> Value {
    let norm = match g.norm() {
        Norm::L1 => json!(1),
        Norm::L2 => json!(2),
        Norm::LInf => json!("inf"),
    };
    json!({
        "dim": g.dim(),
        "lower": g.lower(),
        "upper": g.upper(),
        "nodes": g.nodes_per_axis(),
        "norm": norm,
    })
}

pub fn grid_from_json(v: &Value) -> Result<Grid> {
    let dim = v["dim"].as_u64().ok_or_else(|| Error::usage("grid json: missing dim"))? as usize;
    let arr_f64 = |key: &str| -> Result<Vec<f64>> {
        v[key]
            .as_array()
            .ok_or_else(|| Error::usage(format!("grid json: missing {key}")))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::usage(format!("grid json: bad {key}"))))
            .collect()
    };
    let lower = arr_f64("lower")?;
    let upper = arr_f64("upper")?;
    let nodes: Vec<usize> = v["nodes"]
        .as_array()
        .ok_or_else(|| Error::usage("grid json: missing nodes"))?
        .iter()
        .map(|x| {
            x.as_u64().map(|n| n as usize).ok_or_else(|| Error::usage("grid json: bad nodes"))
        })
        .collect::<Result<_>>()?;
    let norm = match &v["norm"] {
        Value::Number(n) if n.as_u64() == Some(1) => Norm::L1,
        Value::Number(n) if n.as_u64() == Some(2) => Norm::L2,
        Value::String(s) if s == "inf" => Norm::LInf,
        Value::Null => Norm::L2,
        other => return Err(Error::usage(format!("grid json: bad norm {other}"))),
    };
    if lower.len() != dim || upper.len() != dim || nodes.len() != dim {
        return Err(Error::usage("grid json: axis arrays must have `dim` entries"));
    }
    match dim {
        1 => Grid::new_1d(lower[0], upper[0], nodes[0], norm),
        2 => Grid::new_2d([lower[0], lower[1]], [upper[0], upper[1]], [nodes[0], nodes[1]], norm),
        _ => Err(Error::usage("grid json: dim must be 1 or 2")),
    }
}

/// Grid shorthand `lo:hi:n`, 2-D as `lo1:hi1:n1,lo2:hi2:n2`.
pub fn parse_grid_shorthand(s: &str, norm: Norm) -> Result<Grid> {
    let axes: Vec<&str> = s.split(',').collect();
    let parse_axis = |a: &str| -> Result<(f64, f64, usize)> {
        let parts: Vec<&str> = a.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::usage(format!("grid axis {a:?} is not lo:hi:n")));
        }
        let lo: f64 = parts[0].parse().map_err(|_| Error::usage("bad grid lower bound"))?;
        let hi: f64 = parts[1].parse().map_err(|_| Error::usage("bad grid upper bound"))?;
        let n: usize = parts[2].parse().map_err(|_| Error::usage("bad grid node count"))?;
        Ok((lo, hi, n))
    };
    match axes.as_slice() {
        [a] => {
            let (lo, hi, n) = parse_axis(a)?;
            Grid::new_1d(lo, hi, n, norm)
        }
        [a, b] => {
            let (lo1, hi1, n1) = parse_axis(a)?;
            let (lo2, hi2, n2) = parse_axis(b)?;
            Grid::new_2d([lo1, lo2], [hi1, hi2], [n1, n2], norm)
        }
        _ => Err(Error::usage("grid shorthand must have 1 or 2 axes")),
    }
}

/// A function input: a gallery member or explicit samples.
#[derive(Debug, Clone)]
pub enum FunctionSpec {
    Gallery(GalleryFunction),
    Samples(SampledFunction),
}

impl FunctionSpec {
    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::Gallery(g) => g.dim(),
            FunctionSpec::Samples(s) => s.grid().dim(),
        }
    }

    /// Materializes on a grid: samples the gallery evaluator, or checks the
    /// provided samples already live on the requested grid.
    pub fn to_sampled(&self, grid: Option<&Grid>) -> Result<SampledFunction> {
        match (self, grid) {
            (FunctionSpec::Gallery(g), Some(grid)) => {
                crate::sampled::sample(g, grid, Some(g.id().to_string()))
            }
            (FunctionSpec::Gallery(_), None) => {
                Err(Error::usage("a gallery function needs --grid to be sampled"))
            }
            (FunctionSpec::Samples(s), None) => Ok(s.clone()),
            (FunctionSpec::Samples(s), Some(grid)) => {
                if s.grid() != grid {
                    return Err(Error::usage(
                        "--grid disagrees with the grid embedded in the samples",
                    ));
                }
                Ok(s.clone())
            }
        }
    }

    pub fn as_gallery(&self) -> Option<&GalleryFunction> {
        match self {
            FunctionSpec::Gallery(g) => Some(g),
            FunctionSpec::Samples(_) => None,
        }
    }
}

pub fn function_spec_to_json(spec: &FunctionSpec) -> Value {
    match spec {
        FunctionSpec::Gallery(g) => match g {
            GalleryFunction::Affine { a, b } => {
                json!({"kind": "gallery", "id": "affine", "a": a, "b": b})
            }
            GalleryFunction::Piecewise { points } => {
                json!({"kind": "gallery", "id": "pwl",
                       "breakpoints": points.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>()})
            }
            other => json!({"kind": "gallery", "id": other.id()}),
        },
        FunctionSpec::Samples(s) => sampled_to_json(s),
    }
}

/// Samples wire format, with "inf"/"-inf" string sentinels:
/// {"kind":"samples","grid":{...},"values":[...]}.
pub fn sampled_to_json(f: &SampledFunction) -> Value {
    let values: Vec<Value> = f.values().iter().map(|v| f64_to_json(v.to_f64())).collect();
    let mut obj = json!({
        "kind": "samples",
        "grid": grid_to_json(f.grid()),
        "values": values,
    });
    if let Some(name) = f.name() {
        obj["name"] = json!(name);
    }
    obj
}

pub fn sampled_from_json(v: &Value) -> Result<SampledFunction> {
    let grid = grid_from_json(&v["grid"])?;
    let raw = v["values"].as_array().ok_or_else(|| Error::usage("samples json: missing values"))?;
    let mut values = Vec::with_capacity(raw.len());
    for x in raw {
        let f = f64_from_json(x)
            .ok_or_else(|| Error::usage(format!("samples json: bad value {x}")))?;
        values.push(ExtReal::new(f)?);
    }
    let name = v["name"].as_str().map(|s| s.to_string());
    SampledFunction::new(grid, values, name)
}

pub fn function_spec_from_json(v: &Value) -> Result<FunctionSpec> {
    match v["kind"].as_str() {
        Some("gallery") => {
            let id = v["id"].as_str().ok_or_else(|| Error::usage("gallery json: missing id"))?;
            match id {
                "affine" => {
                    let a = v["a"].as_f64().ok_or_else(|| Error::usage("affine: missing a"))?;
                    let b = v["b"].as_f64().ok_or_else(|| Error::usage("affine: missing b"))?;
                    Ok(FunctionSpec::Gallery(GalleryFunction::affine(a, b)?))
                }
                "pwl" => {
                    let pts = v["breakpoints"]
                        .as_array()
                        .ok_or_else(|| Error::usage("pwl: missing breakpoints"))?
                        .iter()
                        .map(|p| {
                            let pair = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                                Error::usage("pwl: breakpoints must be [x, y] pairs")
                            })?;
                            let x = pair[0].as_f64().ok_or_else(|| Error::usage("pwl: bad x"))?;
                            let y = pair[1].as_f64().ok_or_else(|| Error::usage("pwl: bad y"))?;
                            Ok((x, y))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(FunctionSpec::Gallery(GalleryFunction::piecewise(pts)?))
                }
                _ => Ok(FunctionSpec::Gallery(GalleryFunction::by_id(id)?)),
            }
        }
        Some("samples") => Ok(FunctionSpec::Samples(sampled_from_json(v)?)),
        _ => Err(Error::usage("function json: kind must be \"gallery\" or \"samples\"")),
    }
}

/// Parses the --fn argument: `gallery:<id>[:params]`, a path to a JSON file,
/// or inline JSON.
pub fn parse_function_arg(s: &str) -> Result<FunctionSpec> {
    if let Some(rest) = s.strip_prefix("gallery:") {
        let parts: Vec<&str> = rest.split(':').collect();
        return match parts.as_slice() {
            ["affine", a, b] => {
                let a: f64 = a.parse().map_err(|_| Error::usage("gallery:affine:a:b needs numbers"))?;
                let b: f64 = b.parse().map_err(|_| Error::usage("gallery:affine:a:b needs numbers"))?;
                Ok(FunctionSpec::Gallery(GalleryFunction::affine(a, b)?))
            }
            ["pwl", coords @ ..] if !coords.is_empty() => {
                if coords.len() % 2 != 0 {
                    return Err(Error::usage("gallery:pwl:x0:y0:x1:y1... needs coordinate pairs"));
                }
                let mut pts = Vec::new();
                for pair in coords.chunks(2) {
                    let x: f64 = pair[0].parse().map_err(|_| Error::usage("pwl: bad number"))?;
                    let y: f64 = pair[1].parse().map_err(|_| Error::usage("pwl: bad number"))?;
                    pts.push((x, y));
                }
                Ok(FunctionSpec::Gallery(GalleryFunction::piecewise(pts)?))
            }
            [id] => Ok(FunctionSpec::Gallery(GalleryFunction::by_id(id)?)),
            _ => Err(Error::usage(format!("bad gallery spec {s:?}"))),
        };
    }
    if s.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(s)?;
        return function_spec_from_json(&v);
    }
    let text = std::fs::read_to_string(s)
        .map_err(|e| Error::usage(format!("cannot read function file {s:?}: {e}")))?;
    let v: Value = serde_json::from_str(&text)?;
    function_spec_from_json(&v)
}

/// CSV emission of grid columns: coordinates then one column per series.
/// All floats use the shortest round-trip encoding, so identical inputs give
/// byte-identical files.
pub fn write_csv(
    path: &std::path::Path,
    grid: &Grid,
    series: &[(&str, Vec<f64>)],
) -> Result<()> {
    use std::io::Write;
    let mut out = String::new();
    match grid.dim() {
        1 => out.push('x'),
        _ => out.push_str("x0,x1"),
    }
    for (name, _) in series {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..grid.node_count() {
        let p = grid.node_coord(i);
        match grid.dim() {
            1 => out.push_str(&format!("{}", p.x())),
            _ => out.push_str(&format!("{},{}", p.x(), p.y())),
        }
        for (_, vals) in series {
            out.push(',');
            out.push_str(&format!("{}", vals[i]));
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Point;

    #[test]
    fn grid_round_trip() {
        let g = Grid::new_2d([-1.0, 0.0], [1.0, 2.0], [11, 21], Norm::LInf).unwrap();
        let j = grid_to_json(&g);
        let back = grid_from_json(&j).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn shorthand() {
        let g = parse_grid_shorthand("-2:2:401", Norm::L2).unwrap();
        assert_eq!(g.nodes_per_axis(), &[401]);
        let g2 = parse_grid_shorthand("-1:1:201,-1:1:201", Norm::L1).unwrap();
        assert_eq!(g2.dim(), 2);
        assert!(parse_grid_shorthand("1:2", Norm::L2).is_err());
    }

    #[test]
    fn samples_round_trip_with_sentinels() {
        let g = Grid::new_1d(0.0, 1.0, 3, Norm::L2).unwrap();
        let f = SampledFunction::new(
            g,
            vec![ExtReal::finite(1.5), ExtReal::PosInf, ExtReal::NegInf],
            Some("t".into()),
        )
        .unwrap();
        let j = sampled_to_json(&f);
        assert_eq!(j["values"][1], Value::String("inf".into()));
        assert_eq!(j["values"][2], Value::String("-inf".into()));
        let back = sampled_from_json(&j).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn gallery_arg_forms() {
        let f = parse_function_arg("gallery:square").unwrap();
        assert!(matches!(f, FunctionSpec::Gallery(GalleryFunction::Square)));
        let a = parse_function_arg("gallery:affine:3:1").unwrap();
        match a {
            FunctionSpec::Gallery(GalleryFunction::Affine { a, b }) => {
                assert_eq!((a, b), (3.0, 1.0))
            }
            _ => panic!(),
        }
        let p = parse_function_arg("gallery:pwl:-1:0:0:1:1:0").unwrap();
        match p {
            FunctionSpec::Gallery(g) => {
                assert_eq!(g.eval(&Point::d1(0.0)).to_f64(), 1.0);
            }
            _ => panic!(),
        }
        assert!(parse_function_arg("gallery:nope").is_err());
    }
}
