//! Pivots sweep mean rows into one row per curve, one column per size.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use super::{csv_writer, HarnessError};

/// Reads a sweep CSV and writes `family,panel,param,n=<n>...`.
///
/// Jaccard sweeps pivot the mean distance; model sweeps pivot the mean
/// log-likelihood, with the generating, fitted, agg and epsilon labels in
/// the panel. ER curves are indexed by `p`, BA by `power` with a panel per
/// `m`, and WS by `p` with a panel per `nei`. Rows keep first-seen order.
pub fn pivot_for_plot<R: Read, W: Write>(input: R, out: W) -> Result<usize, HarnessError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::Config(format!("input has no {name:?} column")))
    };
    let model = headers.iter().any(|h| h == "fitted");
    let (row, family, n, p, power, m, nei) = (
        col("row")?,
        col("family")?,
        col("n")?,
        col("p")?,
        col("power")?,
        col("m")?,
        col("nei")?,
    );
    let value = col(if model { "log_likelihood" } else { "mean" })?;
    let labels = if model {
        vec![col("generating")?, col("fitted")?, col("agg")?, col("epsilon")?]
    } else {
        Vec::new()
    };

    // (family, panel, param) and the (n, value) points on that curve.
    type Curve = ((String, String, String), Vec<(usize, String)>);
    let mut curves: Vec<Curve> = Vec::new();
    let mut sizes = BTreeSet::new();
    for record in reader.records() {
        let r = record?;
        if &r[row] != "mean" {
            continue;
        }
        let size: usize = r[n]
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad n {:?}", &r[n])))?;
        let (mut panel, param) = match &r[family] {
            "ba" => (format!("m={}", &r[m]), r[power].to_string()),
            "ws" => (format!("nei={}", &r[nei]), r[p].to_string()),
            _ => (String::new(), r[p].to_string()),
        };
        if model {
            let tags = ["generating", "fitted", "agg", "epsilon"];
            let extra: Vec<String> = tags
                .iter()
                .zip(&labels)
                .map(|(t, &c)| format!("{t}={}", &r[c]))
                .collect();
            if !panel.is_empty() {
                panel.push(' ');
            }
            panel.push_str(&extra.join(" "));
        }
        let key = (r[family].to_string(), panel, param);
        sizes.insert(size);
        match curves.iter_mut().find(|(k, _)| *k == key) {
            Some((_, points)) => points.push((size, r[value].to_string())),
            None => curves.push((key, vec![(size, r[value].to_string())])),
        }
    }

    let mut w = csv_writer(out);
    let mut header = vec!["family".to_string(), "panel".into(), "param".into()];
    header.extend(sizes.iter().map(|s| format!("n={s}")));
    w.write_record(&header)?;
    for ((family, panel, param), points) in &curves {
        let mut rec = vec![family.clone(), panel.clone(), param.clone()];
        rec.extend(sizes.iter().map(|s| {
            points
                .iter()
                .find(|(n, _)| n == s)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        }));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(curves.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Family;
    use crate::harness::{run_jaccard_sweep, ExperimentConfig, Grid};

    #[test]
    fn pivots_jaccard_means() {
        let config = ExperimentConfig {
            families: Some(vec![Family::ErdosRenyi, Family::BarabasiAlbert]),
            sizes: vec![8, 16],
            er_p: Grid::Many(vec![0.2, 0.4]),
            ba_power: Grid::One(1.0),
            trials: 2,
            ..ExperimentConfig::default()
        };
        let mut sweep = Vec::new();
        run_jaccard_sweep(&config, &mut sweep).unwrap();
        let mut out = Vec::new();
        let curves = pivot_for_plot(&sweep[..], &mut out).unwrap();
        assert_eq!(curves, 3);
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "family,panel,param,n=8,n=16");
        assert!(lines[1].starts_with("er,,0.2,"));
        assert!(lines[3].starts_with("ba,m=1,1,0,0"), "{}", lines[3]);
    }

    #[test]
    fn missing_columns_are_reported() {
        let err = pivot_for_plot(&b"a,b\n1,2\n"[..], std::io::sink()).unwrap_err();
        assert!(err.to_string().contains("\"row\""));
    }
}
