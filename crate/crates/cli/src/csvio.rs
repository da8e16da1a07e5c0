//! CSV schemas: `t,Q_B,Q_C` for consumption trajectories and
//! `t,QB_RC,QC_RC,QB_D,QC_D,U_RC,U_D` for exchange runs. Comma-separated,
//! `\n` line endings, values formatted with up to 12 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crusoe_core::exchange::ExchangeTrajectory;
use crusoe_core::{GoodId, Trajectory};

use crate::error::CliError;
use crate::fmt::fmt_f64;

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let goods: Vec<&GoodId> = traj.goods().collect();
    let mut out = String::from("t");
    for good in &goods {
        out.push_str(",Q_");
        out.push_str(good.as_str());
    }
    out.push('\n');
    for (i, t) in traj.times().iter().enumerate() {
        out.push_str(&fmt_f64(*t));
        for good in &goods {
            out.push(',');
            out.push_str(&fmt_f64(traj.signal(good).expect("listed good")[i]));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(&path.display().to_string(), e))
}

/// Reads a trajectory CSV. The first column must be `t`; every further
/// column `Q_<good>` becomes a signal.
pub fn read_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"t") || columns.len() < 2 {
        return Err(CliError::Validation(format!(
            "{}: expected header `t,Q_...`, got `{header}`",
            path.display()
        )));
    }
    let mut goods = Vec::new();
    for col in &columns[1..] {
        let name = col.strip_prefix("Q_").ok_or_else(|| {
            CliError::Validation(format!(
                "{}: signal column `{col}` must be named Q_<good>",
                path.display()
            ))
        })?;
        goods.push(
            GoodId::new(name)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        );
    }
    let mut times = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); goods.len()];
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::Validation(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                idx + 2,
                fields.len(),
                columns.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| {
                CliError::Validation(format!(
                    "{}: row {}: `{s}` is not a number",
                    path.display(),
                    idx + 2
                ))
            })
        };
        times.push(parse(fields[0])?);
        for (g, field) in fields[1..].iter().enumerate() {
            series[g].push(parse(field)?);
        }
    }
    let mut signals = BTreeMap::new();
    for (good, values) in goods.into_iter().zip(series) {
        signals.insert(good, values);
    }
    Ok(Trajectory::new(times, signals)?)
}

pub fn write_exchange(path: &Path, traj: &ExchangeTrajectory) -> Result<(), CliError> {
    let mut out = String::from("t,QB_RC,QC_RC,QB_D,QC_D,U_RC,U_D\n");
    for i in 0..traj.times.len() {
        let row = [
            traj.times[i],
            traj.q_b_rc[i],
            traj.q_c_rc[i],
            traj.q_b_d[i],
            traj.q_c_d[i],
            traj.u_rc[i],
            traj.u_d[i],
        ];
        let fields: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(&path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_round_trips_within_format_precision() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let q_b: Vec<f64> = times.iter().map(|t| 25.0 * (1.0 - (-t).exp())).collect();
        let q_c: Vec<f64> = times
            .iter()
            .map(|t| 12.5 * (1.0 - (-4.0 * t).exp()))
            .collect();
        let mut signals = BTreeMap::new();
        signals.insert(GoodId::b(), q_b);
        signals.insert(GoodId::c(), q_c);
        let traj = Trajectory::new(times, signals).unwrap();

        let dir = std::env::temp_dir().join("crusoe-csv-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.csv");
        write_trajectory(&path, &traj).unwrap();
        let back = read_trajectory(&path).unwrap();
        for good in [GoodId::b(), GoodId::c()] {
            for (a, b) in traj
                .signal(&good)
                .unwrap()
                .iter()
                .zip(back.signal(&good).unwrap())
            {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
        fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_headers_are_validation_errors() {
        let dir = std::env::temp_dir().join("crusoe-csv-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        fs::write(&path, "time,Q_B\n0,1\n").unwrap();
        assert!(matches!(
            read_trajectory(&path),
            Err(CliError::Validation(_))
        ));
        fs::remove_file(&path).ok();
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_trajectory(Path::new("/nonexistent/nope.csv")),
            Err(CliError::Io(_))
        ));
    }
}
