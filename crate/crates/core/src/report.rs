//! CSV tables, JSON documents and plot files.
//!
//! Reals are written with 17 significant digits so every value round-trips.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::counting::{CountReport, PiCReport};
use crate::error::Result;
use crate::expsum::SweepRow;
use crate::hb::ManifestEntry;
use crate::sequence::{InversionResult, TermRecord, Window};
use crate::vaaler::VaalerPoly;

pub const SCHEMA_VERSION: u32 = 1;

pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// A header plus rows of preformatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// {"schema_version": 1, "kind": kind, "data": body}.
pub fn json_document<T: Serialize + ?Sized>(kind: &str, body: &T) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "kind": kind, "data": body })
}

pub fn terms_table(recs: &[TermRecord]) -> Table {
    let mut t = Table::new(&["n", "f_mid", "f_rad", "floor", "flags"]);
    for r in recs {
        t.push(vec![r.n.to_string(), real(r.f_mid), real(r.f_rad), opt(r.floor), r.flags()]);
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowRow {
    pub x: f64,
    pub k: i64,
    pub delta1: f64,
    pub delta1_rad: f64,
    pub delta2: f64,
    pub delta2_rad: f64,
    pub first: u64,
    pub end: u64,
    pub count: u64,
}

impl From<&Window> for WindowRow {
    fn from(w: &Window) -> Self {
        Self {
            x: w.x,
            k: w.k,
            delta1: w.delta1.mid_f64(),
            delta1_rad: w.delta1.rad_f64(),
            delta2: w.delta2.mid_f64(),
            delta2_rad: w.delta2.rad_f64(),
            first: w.first(),
            end: w.end(),
            count: w.len(),
        }
    }
}

pub fn windows_table(rows: &[WindowRow]) -> Table {
    let mut t = Table::new(&["x", "k", "delta1", "delta1_rad", "delta2", "delta2_rad", "first", "end", "count"]);
    for r in rows {
        t.push(vec![
            real(r.x),
            r.k.to_string(),
            real(r.delta1),
            real(r.delta1_rad),
            real(r.delta2),
            real(r.delta2_rad),
            r.first.to_string(),
            r.end.to_string(),
            r.count.to_string(),
        ]);
    }
    t
}

pub fn count_table(reps: &[CountReport]) -> Table {
    let mut t = Table::new(&[
        "x",
        "k",
        "delta1",
        "delta2",
        "s_c",
        "undecided",
        "gamma_sum",
        "sigma_sum",
        "residual",
        "density_ratio",
        "route_count",
        "primes_in_range",
        "edge_primes",
        "inversion_undecided",
        "band_violations",
    ]);
    for r in reps {
        t.push(vec![
            real(r.x),
            r.k.to_string(),
            real(r.delta1),
            real(r.delta2),
            r.s_c.to_string(),
            r.undecided.to_string(),
            real(r.gamma_sum),
            real(r.sigma_sum),
            real(r.residual),
            real(r.density_ratio),
            r.route_count.to_string(),
            r.primes_in_range.to_string(),
            r.edge_primes.to_string(),
            r.inversion_undecided.to_string(),
            r.band_violations.to_string(),
        ]);
    }
    t
}

pub fn pi_c_table(reps: &[PiCReport]) -> Table {
    let mut t = Table::new(&["x", "c", "pi_c", "undecided", "ratio"]);
    for r in reps {
        t.push(vec![real(r.x), real(r.c), r.pi_c.to_string(), r.undecided.to_string(), real(r.ratio)]);
    }
    t
}

pub fn inversion_table(rs: &[InversionResult]) -> Table {
    let mut t = Table::new(&["t", "m_lo", "m_lo_rad", "m_hi", "m_hi_rad", "tol", "count"]);
    for r in rs {
        t.push(vec![
            real(r.t),
            real(r.m_lo.mid_f64()),
            real(r.m_lo.rad_f64()),
            real(r.m_hi.mid_f64()),
            real(r.m_hi.rad_f64()),
            real(r.tol),
            opt(r.integer_count()),
        ]);
    }
    t
}

pub fn vaaler_table(vp: &VaalerPoly) -> Table {
    let mut t = Table::new(&["h", "re_a", "im_a", "b"]);
    for h in 0..=vp.m as i64 {
        let a = vp.coeff_a(h);
        t.push(vec![h.to_string(), real(a.re), real(a.im), real(vp.coeff_b(h))]);
    }
    t
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&["N", "h", "k", "abs", "bound", "ratio"]);
    for r in rows {
        t.push(vec![r.n.to_string(), r.h.to_string(), r.k.to_string(), real(r.abs), real(r.bound), real(r.ratio)]);
    }
    t
}

pub fn hb_table(entries: &[ManifestEntry]) -> Table {
    let mut t = Table::new(&["tag", "j", "d_lo", "d_hi", "l_lo", "l_hi", "re", "im", "coeff_max_ratio"]);
    for e in entries {
        t.push(vec![
            format!("{:?}", e.tag),
            e.j.to_string(),
            real(e.d_range.0),
            e.d_range.1.to_string(),
            real(e.l_range.0),
            e.l_range.1.to_string(),
            real(e.value.re),
            real(e.value.im),
            real(e.coeff_max_ratio),
        ]);
    }
    t
}

/// Two whitespace-separated columns x and density_ratio.
pub fn write_density_plot<W: Write>(mut w: W, reps: &[CountReport]) -> Result<()> {
    writeln!(w, "# x density_ratio")?;
    for r in reps {
        writeln!(w, "{} {}", real(r.x), real(r.density_ratio))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(f64::NAN), "nan");
    }

    #[test]
    fn csv_quoting_and_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b\r\n1,\"x,y\"\r\n");
    }

    #[test]
    fn json_has_schema_version() {
        let v = json_document("demo", &[1, 2]);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["data"][1], 2);
    }
}
