//! CSV records, gnuplot scripts and content hashes for sweeps.

use sha2::{Digest, Sha256};

use super::experiment::{fit_exponent, target_exponent, ExperimentRecord};
use crate::error::{Error, Result};

/// Bumped whenever the column set changes.
pub const RECORDS_VERSION: &str = "records-v1";

pub const RECORDS_HEADER: [&str; 20] = [
    "N",
    "d",
    "lambda_N",
    "alpha_N",
    "alpha_exact",
    "P_N",
    "discrete_asym",
    "cap_size",
    "bound_rhs",
    "fitted_C",
    "zeta_measure",
    "measure_constant",
    "continuum_asym",
    "quadrature_error",
    "asym_constant",
    "fem_mu",
    "fem_constant",
    "fk_deficit",
    "version",
    "failures",
];

/// 17 significant digits, enough to round-trip an `f64`.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".into()
    }
}

fn row(r: &ExperimentRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.d.to_string(),
        num(r.lambda_n),
        num(r.alpha_n),
        r.alpha_exact.to_string(),
        num(r.p_n),
        r.discrete_asym.to_string(),
        r.cap_size.to_string(),
        num(r.bound_rhs),
        num(r.fitted_c),
        num(r.zeta_measure),
        num(r.measure_constant),
        num(r.continuum_asym),
        num(r.quadrature_error),
        num(r.asym_constant),
        num(r.fem_mu),
        num(r.fem_constant),
        num(r.fk_deficit),
        RECORDS_VERSION.into(),
        r.failure.clone(),
    ]
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(RECORDS_HEADER).map_err(err)?;
    for r in records {
        w.write_record(row(r)).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_records_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| parse_error(1, e.to_string()))?.clone();
    if header.iter().ne(RECORDS_HEADER.iter().copied()) {
        return Err(parse_error(1, "unexpected header".into()));
    }
    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| parse_error(line, e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| parse_error(line, format!("column {}: {e}", RECORDS_HEADER[i])))
        };
        let u = |i: usize| -> Result<usize> {
            rec[i].parse::<usize>().map_err(|e| parse_error(line, format!("column {}: {e}", RECORDS_HEADER[i])))
        };
        if &rec[18] != RECORDS_VERSION {
            return Err(parse_error(line, format!("record version {} is not {RECORDS_VERSION}", &rec[18])));
        }
        out.push(ExperimentRecord {
            n: u(0)?,
            d: u(1)?,
            lambda_n: f(2)?,
            alpha_n: f(3)?,
            alpha_exact: &rec[4] == "true",
            p_n: f(5)?,
            discrete_asym: u(6)?,
            cap_size: u(7)?,
            bound_rhs: f(8)?,
            fitted_c: f(9)?,
            zeta_measure: f(10)?,
            measure_constant: f(11)?,
            continuum_asym: f(12)?,
            quadrature_error: f(13)?,
            asym_constant: f(14)?,
            fem_mu: f(15)?,
            fem_constant: f(16)?,
            fk_deficit: f(17)?,
            failure: rec[19].to_string(),
        });
    }
    Ok(out)
}

fn parse_error(line: usize, message: String) -> Error {
    Error::Parse { line, column: 1, message }
}

/// Log-log plot of the asymmetry against `N` with the fitted line and a
/// reference line of slope `1 - 1/(2d)` through the first point.
pub fn gnuplot_script(records: &[ExperimentRecord], d: usize, csv_name: &str) -> String {
    let target = target_exponent(d);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale xy\n");
    s.push_str("set key left top\n");
    s.push_str("set xlabel 'N'\n");
    s.push_str("set ylabel 'min_z #(X Δ (B ∩ Z^d + z))'\n");
    s.push_str("set terminal svg size 800,600\n");
    s.push_str("set output 'asymmetry.svg'\n");
    let anchor = records.iter().find(|r| r.is_ok() && r.discrete_asym > 0);
    let mut plots = vec![format!("'{csv_name}' using 1:7 with points pt 7 title 'asymmetry'")];
    if let Some(a) = anchor {
        s.push_str(&format!(
            "ref(x) = {} * (x / {})**{}\n",
            num(a.discrete_asym as f64),
            a.n,
            num(target)
        ));
        plots.push(format!("ref(x) with lines dt 2 title 'slope {target:.4}'"));
    }
    if let Some(fit) = fit_exponent(records) {
        s.push_str(&format!("fit_line(x) = exp({}) * x**{}\n", num(fit.intercept), num(fit.slope)));
        plots.push(format!("fit_line(x) with lines title 'fit {:.4}'", fit.slope));
    }
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Hex SHA-256.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::super::experiment::{run_experiment, Source, SweepSpec};
    use super::*;

    #[test]
    fn csv_round_trip() {
        let s = run_experiment(&SweepSpec::new(2, vec![3, 12], Source::Ball)).unwrap();
        let text = records_to_csv(&s.records).unwrap();
        assert!(text.starts_with("N,d,lambda_N,"));
        let back = parse_records_csv(&text).unwrap();
        assert_eq!(back, s.records);
        assert_eq!(records_to_csv(&back).unwrap(), text);
        let script = gnuplot_script(&s.records, 2, "records.csv");
        assert!(script.contains("using 1:7"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn hash() {
        assert_eq!(
            content_hash(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
