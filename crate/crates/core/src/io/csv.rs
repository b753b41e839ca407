use std::path::Path;

use crate::error::{Error, Result};
use crate::fitting::{ObservedPoint, DEFAULT_SIGMA_KMS};
use crate::io::{num, Payload};
use crate::ObservedCurve;

pub const OBSERVED_HEADER: [&str; 3] = ["r_kpc", "v_kms", "sigma_kms"];

/// Reads `r_kpc,v_kms[,sigma_kms]` rows. `#` lines are comments; a missing
/// sigma defaults to 5 km/s. Rows are sorted by radius.
pub fn load_observed_csv(path: &Path) -> Result<ObservedCurve> {
    let shown = path.display().to_string();
    let parse_err = |line: u64, message: String| Error::Parse {
        path: shown.clone(),
        line,
        message,
    };
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            ::csv::ErrorKind::Io(io) => Error::Io(io),
            other => parse_err(1, format!("{other:?}")),
        })?;

    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names.is_empty() || names == [""] {
        return Err(parse_err(1, "empty file".into()));
    }
    if !(names.len() == 2 || names.len() == 3) || names[..] != OBSERVED_HEADER[..names.len()] {
        return Err(parse_err(
            1,
            format!("expected header `r_kpc,v_kms[,sigma_kms]`, found `{}`", names.join(",")),
        ));
    }

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if !(record.len() == 2 || record.len() == 3) {
            return Err(parse_err(line, format!("expected 2 or 3 columns, found {}", record.len())));
        }
        let field = |i: usize| -> Result<f64> {
            let raw = &record[i];
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{raw}` is not a number ({})", OBSERVED_HEADER[i])))
        };
        let (r, v) = (field(0)?, field(1)?);
        let sigma = if record.len() == 3 && !record[2].is_empty() {
            field(2)?
        } else {
            DEFAULT_SIGMA_KMS
        };
        if !(sigma > 0.0) {
            return Err(parse_err(line, format!("sigma must be positive, got {sigma}")));
        }
        points.push(ObservedPoint { r, v, sigma });
    }
    if points.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    ObservedCurve::new(points).map_err(|e| match e {
        Error::Argument(m) => parse_err(0, m),
        other => other,
    })
}

pub(crate) fn render(payload: &Payload<'_>) -> String {
    let mut out = String::new();
    let mut row = |cells: &[String]| {
        out.push_str(&cells.join(","));
        out.push('\n');
    };
    match payload {
        Payload::Profile { params, profile, curve } => {
            row(&["r_kpc", "rho_msun_kpc3", "menc_msun", "v_kms"].map(String::from));
            for i in 0..profile.len() {
                row(&[
                    num(profile.r()[i]),
                    num(profile.rho()[i]),
                    num(params.m0 + profile.m_dm()[i]),
                    num(curve.v()[i]),
                ]);
            }
        }
        Payload::Observed(obs) => {
            row(&OBSERVED_HEADER.map(String::from));
            for p in obs.points() {
                row(&[num(p.r), num(p.v), num(p.sigma)]);
            }
        }
        Payload::Scan { scan, .. } => {
            row(&["pos_m", "f"].map(String::from));
            for (p, f) in scan.positions.iter().zip(&scan.f) {
                row(&[num(*p), num(*f)]);
            }
        }
        Payload::Fit { fit, .. } => {
            row(&[
                "t_over_m_best",
                "chi2",
                "reduced_chi2",
                "evaluations",
                "bracket_lo",
                "bracket_hi",
                "boundary_hit",
            ]
            .map(String::from));
            row(&[
                num(fit.t_over_m_best),
                num(fit.chi2),
                num(fit.reduced_chi2),
                fit.evaluations.to_string(),
                num(fit.bracket.0),
                num(fit.bracket.1),
                fit.boundary_hit.to_string(),
            ]);
        }
        Payload::Metrics(rows) => {
            row(&["v", "k", "sum_sq", "satisfied"].map(String::from));
            for m in rows.iter() {
                row(&[num(m.visibility), num(m.which_way), num(m.sum_sq), m.satisfied.to_string()]);
            }
        }
        Payload::Intensity { samples, .. } => {
            row(&["y_m", "intensity"].map(String::from));
            for (y, i) in samples.iter() {
                row(&[num(*y), num(*i)]);
            }
        }
        Payload::WaveSpeed { params, speed_kms } => {
            row(&["kt_over_m_kms2", "gamma", "v_s_kms"].map(String::from));
            row(&[num(params.kt_over_m), num(params.gamma), num(*speed_kms)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_columns() {
        let f = file("r_kpc,v_kms,sigma_kms\n10,210,5\n20,215,5\n");
        let c = load_observed_csv(f.path()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.points()[1], ObservedPoint { r: 20.0, v: 215.0, sigma: 5.0 });
    }

    #[test]
    fn two_columns_get_default_sigma() {
        let f = file("# Milky Way\nr_kpc,v_kms\n20,215\n# mid comment\n10,210\n");
        let c = load_observed_csv(f.path()).unwrap();
        assert_eq!(c.radii(), vec![10.0, 20.0]);
        assert!(c.points().iter().all(|p| p.sigma == DEFAULT_SIGMA_KMS));
    }

    #[test]
    fn bad_number_names_line() {
        let f = file("r_kpc,v_kms,sigma_kms\nabc,1,2\n");
        match load_observed_csv(f.path()).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(load_observed_csv(file("").path()).is_err());
        assert!(load_observed_csv(file("r_kpc,v_kms\n").path()).is_err());
        assert!(load_observed_csv(file("radius,speed\n1,2\n").path()).is_err());
        assert!(load_observed_csv(file("r_kpc,v_kms\n1,2\n1,3\n").path()).is_err());
        assert!(load_observed_csv(file("r_kpc,v_kms,sigma_kms\n1,2,0\n").path()).is_err());
        assert!(load_observed_csv(file("r_kpc,v_kms\n1,2,3,4\n").path()).is_err());
        assert!(matches!(load_observed_csv(Path::new("/nonexistent/x.csv")), Err(Error::Io(_))));
    }
}
