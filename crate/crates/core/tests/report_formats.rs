use tanprimes::counting::count_sc;
use tanprimes::report::{self, json_document, real, SCHEMA_VERSION};
use tanprimes::sequence::{TermEnumerator, Window, DEFAULT_TOL};
use tanprimes::vaaler::build_vaaler;
use tanprimes::{EvalConfig, Params};

fn p() -> Params {
    Params::new(1.05, 2.0).unwrap()
}

#[test]
fn count_csv_columns() {
    let r = count_sc(1e3, &p(), EvalConfig::default(), DEFAULT_TOL).unwrap();
    let csv = report::count_table(&[r]).to_csv();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("x,k,delta1,delta2,s_c,undecided,gamma_sum,sigma_sum,residual,density_ratio"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "46");
    assert_eq!(row[0], real(1e3));
}

#[test]
fn terms_csv_round_trips_reals() {
    let w = Window::make(1e3, &p()).unwrap();
    let recs = TermEnumerator::new(&w, EvalConfig::default()).unwrap().range(1175, 1180);
    let csv = report::terms_table(&recs).to_csv();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["n", "f_mid", "f_rad", "floor", "flags"]);
    for (rec, t) in rd.records().zip(&recs) {
        let rec = rec.unwrap();
        assert_eq!(rec[1].parse::<f64>().unwrap(), t.f_mid);
        assert_eq!(rec[3].parse::<i64>().unwrap(), t.floor.unwrap());
    }
}

#[test]
fn vaaler_dump_and_json() {
    let vp = build_vaaler(8).unwrap();
    let t = report::vaaler_table(&vp);
    assert_eq!(t.columns, ["h", "re_a", "im_a", "b"]);
    assert_eq!(t.rows.len(), 9);
    let doc = json_document("vaaler", &vp);
    assert_eq!(doc["schema_version"], SCHEMA_VERSION);
    assert_eq!(doc["data"]["m"], 8);
}

#[test]
fn density_plot_has_two_columns() {
    let r = count_sc(1e3, &p(), EvalConfig::default(), DEFAULT_TOL).unwrap();
    let mut buf = Vec::new();
    report::write_density_plot(&mut buf, &[r.clone(), r]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data.iter().all(|l| l.split_whitespace().count() == 2));
}
