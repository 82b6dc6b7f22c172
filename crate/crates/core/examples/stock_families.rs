//! Prints every route's verdict for the stock families on their default grids.
//!
//! ```text
//! cargo run --release -p tailclass-core --example stock_families
//! ```
//!
//! Set `VERBOSE=1` to print the reason behind each verdict.

use std::time::Instant;
use tailclass_core::*;

const STOCK: [&str; 9] = [
    "pareto:a=1",
    "pareto:a=2",
    "pareto:a=3",
    "exp:rate=1",
    "weibull:shape=0.5,scale=1",
    "weibull:shape=2,scale=1",
    "lpp:a=2,p=0.3",
    "lognormal:mu=0,sigma=1",
    "burr:c=2,k=1",
];

fn main() {
    let c = Classifier::default();
    let verbose = std::env::var_os("VERBOSE").is_some();
    println!(
        "{:<28} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>7}",
        "model", "E direct", "E M1", "D direct", "D M2", "L", "S conv", "S pitman", "D∩A", "seconds"
    );
    for s in STOCK {
        let m = build(s.parse().expect("stock spec parses")).expect("stock parameters are valid");
        let g = GridSpec::for_model(&m);
        let t = Instant::now();
        let verdicts = [
            c.test_e(&m, &g, ERoute::Direct),
            c.test_e(&m, &g, ERoute::HazardM1),
            c.test_d(&m, &g, DRoute::Direct),
            c.test_d(&m, &g, DRoute::HazardM2),
            c.test_l(&m, &g),
            c.test_s(&m, &g, SRoute::SelfConvolution),
            c.test_s(&m, &g, SRoute::Pitman),
            c.test_dcap_a(&m, &g),
        ];
        let cells: Vec<String> = verdicts.iter().map(|v| format!("{:>12}", v.verdict.to_string())).collect();
        println!("{s:<28} {} {:>7.2}", cells.join(" "), t.elapsed().as_secs_f64());
        if verbose {
            for v in &verdicts {
                println!("    {} {}: {}", v.class, v.route, v.reason);
            }
        }
    }
}
