//! Plain-text tables for reports.

use std::fmt::Write as _;

use crate::format::{Entry, Outcome, ReportFile};

pub fn entry(e: &Entry) -> String {
    match (e.a, e.b) {
        (a, 0) => a.to_string(),
        (0, 1) => "π".into(),
        (0, -1) => "-π".into(),
        (0, b) => format!("{b}π"),
        (a, 1) => format!("{a}+π"),
        (a, -1) => format!("{a}-π"),
        (a, b) if b < 0 => format!("{a}{b}π"),
        (a, b) => format!("{a}+{b}π"),
    }
}

fn matrix(out: &mut String, rows: &[Vec<Entry>]) {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(entry).collect()).collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
    for r in &cells {
        let line: Vec<String> = r
            .iter()
            .map(|c| format!("{}{c}", " ".repeat(width - c.chars().count())))
            .collect();
        let _ = writeln!(out, "  [ {} ]", line.join("  "));
    }
}

fn outcome(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Inconclusive => "OPEN",
        Outcome::Skipped => "SKIP",
    }
}

pub fn human(r: &ReportFile) -> String {
    let mut s = String::new();
    let w = &mut s;
    let name = r.input.name.as_deref().unwrap_or("-");
    let _ = writeln!(
        w,
        "{}  {name}  δ={}  K={}",
        r.command, r.input.delta, r.input.precision_bits
    );

    if let Some(j) = &r.jordan {
        let _ = writeln!(w, "\njordan components");
        let _ = writeln!(w, "  {:>5} {:>4} {:>4}  tail", "scale", "rank", "hyp");
        for c in &j.components {
            let _ = writeln!(
                w,
                "  {:>5} {:>4} {:>4}  {:?}",
                c.scale, c.rank, c.hyperbolic_count, c.exact_tail
            );
        }
        let _ = writeln!(w, "normal form");
        matrix(w, &j.normal_form);
        let _ = writeln!(w, "transform U");
        matrix(w, &j.transform);
    }

    if let Some(p) = &r.profile {
        let _ = writeln!(w, "\ntype profile  {p}");
        let _ = writeln!(
            w,
            "  {:>5} {:>4}  {:<7} {:<5} {:>4} {:>4}  tail",
            "scale", "rank", "type", "bound", "b̄", "γ̄"
        );
        for e in &p.entries {
            let bbar = e.bbar.map_or("-".to_string(), |b| b.to_string());
            let _ = writeln!(
                w,
                "  {:>5} {:>4}  {:<7} {:<5} {:>4} {:>4}  {}",
                e.scale,
                e.rank,
                e.tag.as_str(),
                if e.bound { "bound" } else { "free" },
                bbar,
                e.gamma_bar,
                e.tail.label()
            );
        }
    }

    if let Some(d) = &r.density {
        let x = &d.exponents;
        let u = &d.unipotent;
        let _ = writeln!(w, "\ndensity  f={}  n={}", d.f, d.rank);
        let _ = writeln!(w, "  β_L      = {}  ({})", d.beta_l, d.beta_l_symbolic);
        let _ = writeln!(w, "  #G̃(κ)   = {}", d.fiber_count);
        let _ = writeln!(
            w,
            "  N_M={}  N_H={}  N={}  a={}  l={}  l'={}  dim G̃¹={}  β={}",
            x.n_m, x.n_h, x.n, x.a, u.l, u.l_prime, u.dim_g1, d.beta
        );
        for f in &d.factors {
            let _ = writeln!(
                w,
                "  scale {:>3}  {:<8} dim {:>3}  order {}",
                f.scale, f.group, f.dim, f.order
            );
        }
    }

    if let Some(n) = &r.naive {
        let _ = writeln!(w, "\nnaive counts  n={}  kmax={}", n.rank, n.kmax);
        let _ = writeln!(w, "  {:>3}  {:>24}  ratio", "k", "N_k");
        for l in &n.levels {
            let _ = writeln!(w, "  {:>3}  {:>24}  {}", l.k, l.count, l.ratio);
        }
        match (&n.value, n.stabilized_at) {
            (Some(v), Some(k)) => {
                let _ = writeln!(w, "  stabilized at k={k}: {v}");
            }
            _ => {
                let _ = writeln!(w, "  not stabilized{}", if n.partial { " (budget)" } else { "" });
            }
        }
        if let Some(fc) = &n.filter_check {
            let _ = writeln!(
                w,
                "  brute force at k={}: {} invertible, {} total",
                fc.k, fc.brute_invertible, fc.brute_all
            );
        }
    }

    if let Some(f) = &r.fiber {
        let e = &f.enumeration;
        let _ = writeln!(
            w,
            "\nfiber enumeration  {} variables, {} candidates",
            e.variables.len(),
            e.candidates
        );
        let _ = writeln!(
            w,
            "  points {}  expected {}{}",
            e.count,
            f.expected,
            if e.partial { "  (partial)" } else { "" }
        );
        if let Some(points) = &e.points {
            let _ = writeln!(w, "  {}", e.variables.join(" "));
            for p in points {
                let c: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(w, "  {}", c.join(" "));
            }
        }
    }

    if let Some(sl) = &r.sublattices {
        let _ = writeln!(w, "\nsublattices  {:>5}  A/B  W/X  B/Z  B/Y", "scale");
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        for (c, e) in sl.computed.iter().zip(&sl.expected) {
            let _ = writeln!(
                w,
                "  computed   {:>5}  {:>3}  {:>3}  {:>3}  {:>3}",
                c.scale,
                c.a_over_b,
                c.w_over_x,
                opt(c.b_over_z),
                opt(c.b_over_y)
            );
            let _ = writeln!(
                w,
                "  closed     {:>5}  {:>3}  {:>3}  {:>3}  {:>3}",
                e.scale,
                e.a_over_b,
                e.w_over_x,
                opt(e.b_over_z),
                opt(e.b_over_y)
            );
        }
    }

    if !r.checks.is_empty() {
        let _ = writeln!(w, "\nchecks");
        for c in &r.checks {
            let _ = writeln!(w, "  {}  {:<16} {}", outcome(c.outcome), c.name, c.detail);
        }
    }
    if let Some(e) = &r.error {
        let _ = writeln!(w, "\nerror: {e}");
    }
    let _ = writeln!(w, "\nexit {}", r.exit_code);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries() {
        let e = |a, b| entry(&Entry { a, b });
        assert_eq!(e(1, 0), "1");
        assert_eq!(e(0, 1), "π");
        assert_eq!(e(0, -2), "-2π");
        assert_eq!(e(3, -1), "3-π");
        assert_eq!(e(-1, 2), "-1+2π");
        assert_eq!(e(2, -3), "2-3π");
    }
}
