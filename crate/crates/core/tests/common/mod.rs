//! Comparisons of library results with the values frozen by
//! `scripts/oracles.py` in `tests/data/oracles.json`.

#![allow(dead_code)]

use serde_json::Value;
use std::sync::Arc;
use tailclass_core::asymptotics::xh_sequence;
use tailclass_core::*;

pub const ORACLES: &str = include_str!("../data/oracles.json");

/// Relative tolerance for quantities the library computes by quadrature.
pub const QUADRATURE_REL: f64 = 1e-6;
/// Relative tolerance for quantities that are closed forms on both sides.
pub const CLOSED_FORM_REL: f64 = 1e-9;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn family(s: &str) -> Family {
    build(s.parse::<FamilySpec>().expect("valid spec")).expect("valid parameters")
}

pub fn arc(s: &str) -> Arc<dyn DistributionModel> {
    Arc::new(family(s))
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("expected a number, got {v}"))
}

fn grid_of(v: &Value) -> GridSpec {
    GridSpec {
        x_start: f(&v["x_start"]),
        ratio: f(&v["ratio"]),
        count: v["count"].as_u64().unwrap() as usize,
        window: v["window"].as_u64().unwrap() as usize,
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let r = rel(got, want);
        self.0.push(Check {
            name: name.to_string(),
            pass: r <= tol,
            detail: format!("got {got:.12e}, oracle {want:.12e}, rel {r:.2e} (tol {tol:.0e})"),
        });
    }

    fn truth(&mut self, name: &str, pass: bool, detail: String) {
        self.0.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
    }
}

/// Runs every oracle comparison.
pub fn oracle_checks() -> Vec<Check> {
    let o: Value = serde_json::from_str(ORACLES).expect("oracles.json parses");
    let q = QuadratureSpec::default();
    let c = Classifier::default();
    let mut ck = Checks(Vec::new());

    let w = family("weibull:shape=0.5,scale=1");
    ck.close("weibull(0.5) hazard at 4", w.hazard(4.0).unwrap(), f(&o["weibull05_hazard_at_4"]), 1e-12);

    let ex = family("exp:rate=1");
    let cap = &o["exp_ratio_u2_capped"];
    let g = grid_of(&cap["grid"]);
    let est = ratio_limit(&|x: f64| ex.log_tail(x), 2.0, &g).unwrap();
    ck.close("exp(1) tail ratio u=2 capped grid: upper", est.upper, f(&cap["upper"]), CLOSED_FORM_REL);
    ck.close("exp(1) tail ratio u=2 capped grid: lower", est.lower, f(&cap["lower"]), CLOSED_FORM_REL);
    ck.truth(
        "exp(1) tail ratio u=2 capped grid: decreasing trend",
        est.trend < 0.0 && f(&cap["trend"]) < 0.0,
        format!("trend {} (oracle {})", est.trend, f(&cap["trend"])),
    );

    let ix = matuszewska_indices(&|x: f64| ex.log_tail(x), &GridSpec::for_model(&ex), &[2.0, 4.0, 8.0, 16.0, 32.0])
        .unwrap();
    let oracle_inf = o["exp_tail_index"]["delta_infinite"].as_bool().unwrap();
    ck.truth(
        "exp(1) tail index flagged +inf",
        oracle_inf && ix.flags.contains(&IndexFlag::DeltaPosInfinite) && ix.delta == f64::INFINITY,
        format!("delta {} flags {:?}, oracle infinite = {oracle_inf}", ix.delta, ix.flags),
    );

    let ln = family("lognormal:mu=0,sigma=1");
    let lx = &o["lognormal_xh"];
    let seq = xh_sequence(&ln, &grid_of(&lx["grid"])).unwrap();
    let worst = seq
        .values
        .iter()
        .zip(lx["values"].as_array().unwrap())
        .map(|(a, b)| rel(*a, f(b)))
        .fold(0.0, f64::max);
    ck.truth(
        "lognormal x h(x) on the default grid",
        worst <= CLOSED_FORM_REL,
        format!("max rel deviation {worst:.2e}"),
    );
    let est = seq.estimate();
    ck.close("lognormal x h(x) window lower", est.lower, f(&lx["lower"]), CLOSED_FORM_REL);
    ck.close("lognormal x h(x) window upper", est.upper, f(&lx["upper"]), CLOSED_FORM_REL);
    let v = c.test_e(&ln, &GridSpec::for_model(&ln), ERoute::Both);
    let want = o["expected_verdicts"]["lognormal_E"].as_str().unwrap();
    ck.truth(
        "lognormal E verdict",
        v.verdict.to_string() == want,
        format!("got {} (oracle {want})", v.verdict),
    );

    let pot = &o["exp_potter_5"];
    let fit = fit_potter(
        &|x: f64| ex.log_density(x),
        5.0,
        PotterDirection::UpperBound,
        &GridSpec::for_model(&ex),
    )
    .unwrap();
    ck.close("exp(1) Potter exponent 5: C", fit.c, f(&pot["c"]), CLOSED_FORM_REL);
    ck.truth(
        "exp(1) Potter exponent 5: x0 and C below the continuous supremum",
        fit.x0 == f(&pot["x0"]) && fit.c <= f(&pot["continuous_sup"]),
        format!("x0 {} C {} sup {}", fit.x0, fit.c, f(&pot["continuous_sup"])),
    );

    let (p2, p3) = (family("pareto:a=2"), family("pareto:a=3"));
    let d10 = &o["pareto23_density_at_10"];
    ck.close(
        "pareto(2)*pareto(3) density at 10",
        convolve_density(&p2, &p3, 10.0, &q).unwrap(),
        f(&d10["closed"]),
        QUADRATURE_REL,
    );
    ck.close(
        "pareto(2)*pareto(3) density at 10: trapezoid vs closed form",
        f(&d10["trapezoid"]),
        f(&d10["closed"]),
        QUADRATURE_REL,
    );
    let t100 = &o["pareto23_tail_at_100"];
    ck.close(
        "pareto(2)*pareto(3) tail at 100",
        convolution_tail(&p2, &p3, 100.0, &q).unwrap().exp(),
        f(&t100["closed"]),
        QUADRATURE_REL,
    );
    ck.close(
        "pareto(2)*pareto(3) tail at 100: trapezoid vs closed form",
        f(&t100["trapezoid"]),
        f(&t100["closed"]),
        QUADRATURE_REL,
    );

    let pr = &o["pareto_ratios"];
    let s = self_convolution_ratio(&p2, 1e3, &q).unwrap();
    ck.close("pareto(2) self-convolution ratio at 1e3", s, f(&pr["self_ratio_pareto2_1e3"]), QUADRATURE_REL);
    ck.truth(
        "pareto(2) self-convolution ratio at 1e3 in (2, 2.02)",
        s > 2.0 && s < 2.02,
        format!("{s}"),
    );
    let m23 = max_sum_ratio(&p2, &p3, 1e3, &q).unwrap();
    ck.close("pareto(2),pareto(3) max-sum ratio at 1e3", m23, f(&pr["max_sum_23_1e3"]), QUADRATURE_REL);
    let m22 = max_sum_ratio(&p2, &p2, 1e3, &q).unwrap();
    ck.close("pareto(2),pareto(2) max-sum ratio at 1e3", m22, f(&pr["max_sum_22_1e3"]), QUADRATURE_REL);
    ck.truth(
        "max-sum ratios at 1e3 within 1 ± 0.05",
        (m23 - 1.0).abs() <= 0.05 && (m22 - 1.0).abs() <= 0.05,
        format!("{m23}, {m22}"),
    );
    let xh = 1e3 * convolution_hazard(&p2, &p3, 1e3, &q).unwrap();
    ck.close("pareto(2)*pareto(3) x h(x) at 1e3", xh, f(&pr["xh_conv_23_1e3"]), QUADRATURE_REL);
    ck.truth("pareto(2)*pareto(3) x h(x) at 1e3 within 2 ± 0.2", (xh - 2.0).abs() <= 0.2, format!("{xh}"));

    let win = &o["max_sum_22_window"];
    let worst = win["xs"]
        .as_array()
        .unwrap()
        .iter()
        .zip(win["values"].as_array().unwrap())
        .map(|(x, v)| rel(max_sum_ratio(&p2, &p2, f(x), &q).unwrap(), f(v)))
        .fold(0.0, f64::max);
    ck.truth(
        "pareto(2),pareto(2) max-sum ratio over the top window",
        worst <= QUADRATURE_REL,
        format!("max rel deviation {worst:.2e}"),
    );

    for (key, spec) in [
        ("pareto2", "pareto:a=2"),
        ("weibull05", "weibull:shape=0.5,scale=1"),
        ("lognormal", "lognormal:mu=0,sigma=1"),
    ] {
        let m = family(spec);
        for kappa in ["0.5", "1.0", "2.0"] {
            let k: f64 = kappa.parse().unwrap();
            ck.close(
                &format!("pitman integral {spec} kappa={kappa} x=1e4"),
                pitman_integral(&m, k, 1e4, &q).unwrap(),
                f(&o["pitman_at_1e4"][key][kappa]),
                QUADRATURE_REL,
            );
        }
    }

    let w2 = family("weibull:shape=2,scale=1");
    for x in ["3.0", "5.0", "8.0"] {
        ck.close(
            &format!("weibull(2) self-convolution ratio at {x}"),
            self_convolution_ratio(&w2, x.parse().unwrap(), &q).unwrap(),
            f(&o["weibull2_self_ratio"][x]),
            QUADRATURE_REL,
        );
    }
    let v = c.test_s(&w2, &GridSpec::for_model(&w2), SRoute::SelfConvolution);
    let want = o["expected_verdicts"]["weibull2_S"].as_str().unwrap();
    ck.truth("weibull(2) S verdict", v.verdict.to_string() == want, format!("got {} (oracle {want})", v.verdict));

    for x in ["100.0", "1000.0", "10000.0"] {
        ck.close(
            &format!("lognormal self-convolution ratio at {x}"),
            self_convolution_ratio(&ln, x.parse().unwrap(), &q).unwrap(),
            f(&o["lognormal_self_ratio"][x]),
            QUADRATURE_REL,
        );
    }
    let v = c.test_s(&ln, &GridSpec::for_model(&ln), SRoute::SelfConvolution);
    let want = o["expected_verdicts"]["lognormal_S"].as_str().unwrap();
    ck.truth("lognormal S verdict", v.verdict.to_string() == want, format!("got {} (oracle {want})", v.verdict));

    let v = c.test_d(&w, &GridSpec::for_model(&w), DRoute::Both);
    let want = o["expected_verdicts"]["weibull05_D"].as_str().unwrap();
    ck.truth("weibull(0.5) D verdict", v.verdict.to_string() == want, format!("got {} (oracle {want})", v.verdict));

    let lpp = family("lpp:a=2,p=0.3");
    for (u, b) in o["lpp_ratio_bounds"].as_object().unwrap() {
        let u: f64 = u.parse().unwrap();
        let est = ratio_limit(&|x: f64| lpp.log_tail(x), u, &GridSpec::for_model(&lpp)).unwrap();
        ck.close(&format!("lpp(2,0.3) tail ratio u={u}: lower"), est.lower, f(&b["lower"]), CLOSED_FORM_REL);
        ck.close(&format!("lpp(2,0.3) tail ratio u={u}: upper"), est.upper, f(&b["upper"]), CLOSED_FORM_REL);
        ck.truth(
            &format!("lpp(2,0.3) tail ratio u={u}: within e^(±2p) u^-a"),
            est.lower >= f(&b["bound_low"]) && est.upper <= f(&b["bound_high"]) && est.lower < est.upper,
            format!("[{}, {}]", est.lower, est.upper),
        );
    }

    let pot = &o["potter"];
    let b = c.check_xh_lower_bound(&p2, 2.0, &GridSpec::for_model(&p2)).unwrap();
    ck.close("pareto(2) lower bound delta=2: C", b.fitted.unwrap().c, f(&pot["pareto2_delta2_c"]), CLOSED_FORM_REL);
    ck.close("pareto(2) lower bound delta=2: rhs", b.rhs, f(&pot["pareto2_delta2_rhs"]), CLOSED_FORM_REL);
    let b = c.check_xh_lower_bound(&p3, 2.5, &GridSpec::for_model(&p3)).unwrap();
    ck.close("pareto(3) lower bound delta=2.5: C", b.fitted.unwrap().c, f(&pot["pareto3_delta2.5_c"]), CLOSED_FORM_REL);
    ck.close("pareto(3) lower bound delta=2.5: rhs", b.rhs, f(&pot["pareto3_delta2.5_rhs"]), CLOSED_FORM_REL);
    let b = c.check_xh_upper_bound(&p2, 3.5, 2.0, &GridSpec::for_model(&p2)).unwrap();
    ck.close("pareto(2) upper bound gamma=3.5: C'", b.fitted.unwrap().c, f(&pot["pareto2_gamma3.5_c"]), CLOSED_FORM_REL);
    ck.close(
        "pareto(2) upper bound gamma=3.5 lambda=2: rhs",
        b.rhs,
        f(&pot["pareto2_gamma3.5_lambda2_rhs"]),
        CLOSED_FORM_REL,
    );
    ck.close("V(2, 2)", v_lambda_gamma(2.0, 2.0), f(&pot["v_2_2"]), 0.0);
    ck.close("V(2, 1)", v_lambda_gamma(2.0, 1.0), f(&pot["v_2_1"]), 0.0);

    ck.0
}
