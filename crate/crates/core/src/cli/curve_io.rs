//! Curve files: CSV with header
//! `s,x,y,z[,u,v],Tx,Ty,Tz,Vx,Vy,Vz,Ux,Uy,Uz,kg,kn,tg,sigma_v`.
//!
//! Values are written with 17 significant digits so a file read back
//! reproduces the samples exactly. Undefined `σ_v` is written as `nan`.

use std::io::{Read, Write};

use crate::analysis::AnalyzedCurve;
use crate::frame::{CurveSamples, DarbouxFrame};
use crate::vector::Vector3;

use super::CliError;

const FRAME_COLUMNS: [&str; 9] = ["Tx", "Ty", "Tz", "Vx", "Vy", "Vz", "Ux", "Uy", "Uz"];

fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_curve<W: Write>(out: W, c: &AnalyzedCurve<f64>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let uv = c.curve.uv();
    let mut header = vec!["s", "x", "y", "z"];
    if uv.is_some() {
        header.extend(["u", "v"]);
    }
    header.extend(FRAME_COLUMNS);
    header.extend(["kg", "kn", "tg", "sigma_v"]);
    w.write_record(&header).map_err(CliError::io)?;
    for i in 0..c.len() {
        let p = c.curve.points()[i];
        let mut row = vec![c.s()[i], p.x, p.y, p.z];
        if let Some(uv) = uv {
            row.extend([uv[i].0, uv[i].1]);
        }
        let f = &c.frames[i];
        for v in [f.t, f.v, f.u] {
            row.extend(v.to_array());
        }
        let sc = &c.scalars[i];
        row.extend([sc.kappa_g, sc.kappa_n, sc.tau_g, c.sigma_v[i].unwrap_or(f64::NAN)]);
        w.write_record(row.into_iter().map(fmt)).map_err(CliError::io)?;
    }
    w.flush().map_err(|e| CliError::io(e.into()))?;
    Ok(())
}

/// Samples read from a curve file. Frames are present only when all nine
/// frame columns are.
#[derive(Clone, Debug)]
pub struct CurveFile {
    pub curve: CurveSamples<f64>,
    pub frames: Option<Vec<DarbouxFrame<f64>>>,
}

pub fn read_curve<R: Read>(input: R) -> Result<CurveFile, CliError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(|e| CliError::config(format!("curve file: {e}")))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| CliError::config(format!("curve file: missing column `{name}`")));
    let (is, ix, iy, iz) = (need("s")?, need("x")?, need("y")?, need("z")?);
    let iuv = match (col("u"), col("v")) {
        (Some(u), Some(v)) => Some((u, v)),
        (None, None) => None,
        _ => return Err(CliError::config("curve file: columns `u` and `v` must appear together")),
    };
    let iframe: Option<Vec<usize>> = FRAME_COLUMNS.iter().map(|c| col(c)).collect();
    let (mut s, mut points, mut uv, mut frames) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::config(format!("curve file: {e}")))?;
        let get = |i: usize| -> Result<f64, CliError> {
            let field = rec.get(i).unwrap_or("");
            field
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("curve file row {}: bad number \"{field}\"", line + 2)))
        };
        s.push(get(is)?);
        points.push(Vector3::new(get(ix)?, get(iy)?, get(iz)?));
        if let Some((iu, iv)) = iuv {
            uv.push((get(iu)?, get(iv)?));
        }
        if let Some(idx) = &iframe {
            let v = |k: usize| -> Result<Vector3<f64>, CliError> {
                Ok(Vector3::new(get(idx[3 * k])?, get(idx[3 * k + 1])?, get(idx[3 * k + 2])?))
            };
            frames.push(DarbouxFrame { t: v(0)?, v: v(1)?, u: v(2)? });
        }
    }
    let curve = CurveSamples::new(s, points, iuv.map(|_| uv)).map_err(|e| CliError::config(format!("curve file: {e}")))?;
    Ok(CurveFile { curve, frames: iframe.map(|_| frames) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_increasing_arc_length_is_rejected() {
        let text = "s,x,y,z\n0,0,0,0\n0.1,0.1,0,0\n0.1,0.2,0,0\n";
        let err = read_curve(text.as_bytes()).unwrap_err();
        assert_eq!(err.code, super::super::EXIT_CONFIG);
    }

    #[test]
    fn missing_columns_are_reported() {
        let err = read_curve("s,x,y\n0,0,0\n".as_bytes()).unwrap_err();
        assert!(err.message.contains("`z`"), "{}", err.message);
    }

    #[test]
    fn positions_only_file_has_no_frames() {
        let text = "s, x, y, z\n0,1,0,0\n1,1,0,1\n";
        let f = read_curve(text.as_bytes()).unwrap();
        assert!(f.frames.is_none() && f.curve.uv().is_none());
        assert_eq!(f.curve.points()[1], Vector3::new(1.0, 0.0, 1.0));
    }
}
