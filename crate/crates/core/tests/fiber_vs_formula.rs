use hermdens::fiber::{verify_fiber, FiberLimits};
use hermdens::{jordan_split, JordanComponent, JordanDecomposition, Ring, Tail, TypeProfile};

fn options(scale: i64) -> Vec<(usize, Tail)> {
    if scale % 2 == 1 {
        vec![(2, Tail::H1), (2, Tail::A4a { a: 0 }), (2, Tail::A4a { a: 1 })]
    } else {
        vec![
            (1, Tail::Unit { a: 1 }),
            (1, Tail::Unit { a: 3 }),
            (2, Tail::None),
            (2, Tail::A2d2b1 { b: 1 }),
            (2, Tail::A12b1 { b: 0 }),
            (2, Tail::A12b1 { b: 1 }),
            (3, Tail::Unit { a: 1 }),
            (3, Tail::Unit { a: 3 }),
        ]
    }
}

fn shapes(max_scale: i64) -> Vec<Vec<(i64, usize, Tail)>> {
    let mut out = vec![vec![]];
    for s in 0..=max_scale {
        let mut next = Vec::new();
        for base in &out {
            next.push(base.clone());
            let used: usize = base.iter().map(|c: &(i64, usize, Tail)| c.1).sum();
            for (r, t) in options(s) {
                if used + r <= 3 {
                    let mut b = base.clone();
                    b.push((s, r, t));
                    next.push(b);
                }
            }
        }
        out = next;
    }
    out.retain(|v| !v.is_empty());
    out
}

#[test]
fn every_small_shape() {
    let mut bad = Vec::new();
    let mut total = 0;
    for delta in [1, 3] {
        for shape in shapes(3) {
            let ring = Ring::new(20, delta).unwrap();
            let comps = shape
                .iter()
                .map(|&(s, r, t)| JordanComponent::new(s, r, t, delta).unwrap())
                .collect();
            let raw = JordanDecomposition::from_components(ring, comps).unwrap();
            let d = jordan_split(&raw.normal_gram()).unwrap();
            let p = TypeProfile::from_decomposition(&d).unwrap();
            total += 1;
            let r = match verify_fiber(&d, FiberLimits::default(), false) {
                Ok(r) => r,
                Err(e) => {
                    bad.push(format!("δ={delta} {shape:?} [{p}] error {e}"));
                    continue;
                }
            };
            if !r.matches {
                bad.push(format!("δ={delta} {shape:?} [{p}] got {} want {}", r.enumeration.count, r.expected));
            }
        }
    }
    for b in &bad {
        println!("{b}");
    }
    println!("{} of {total} mismatched", bad.len());
    assert!(bad.is_empty());
}
