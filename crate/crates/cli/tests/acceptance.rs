//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dwork_core::dwork::{canonical_classes, derive_params, enumerate_w};
use dwork_core::gauss::{gauss_gk, gk_product, CharExp};
use dwork_core::hyperfun::{eval_f, eval_g, FParams, GParams};
use dwork_core::rational::{fract, frac, Frac};
use dwork_core::residue::inv_mod_u64;
use dwork_core::{brute_count, DworkInstance, Engine, Method, PadicContext, PadicGamma, PrecisionPolicy, ValuedPadic};

type Outcome = Result<String, String>;

fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&q| q % 2 == 1 && (3..q).take_while(|f| f * f <= q).all(|f| q % f != 0)).collect()
}

/// `(p, n, λ)` over the two verification grids.
fn grid(with_zero: bool) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut add = |ps: Vec<u64>, n: u64| {
        for p in ps.into_iter().filter(|p| n % p != 0) {
            for l in (if with_zero { 0 } else { 1 })..p {
                out.push((p, n, l));
            }
        }
    };
    for n in 2..=4 {
        add(primes(3, 31), n);
    }
    add(vec![3, 7, 11, 13], 5);
    out
}

fn exact(e: &Engine, inst: &DworkInstance, m: Method) -> Result<BigUint, String> {
    let c = e.count(inst, m, PrecisionPolicy::default()).map_err(|err| format!("{m} on {inst:?}: {err}"))?;
    c.value.exact().cloned().ok_or_else(|| format!("{m} on {inst:?} is not exact"))
}

fn instance(p: u64, n: u64, l: u64) -> DworkInstance {
    DworkInstance::new(p, n, l as i64).expect("grid instances are valid")
}

fn against_oracle(e: &Engine, cells: &[(u64, u64, u64)], m: Method) -> Outcome {
    for &(p, n, l) in cells {
        let got = exact(e, &instance(p, n, l), m)?;
        let want = brute_count(p, n, l as i64);
        if got != BigUint::from(want) {
            return Err(format!("{m} p={p} n={n} lambda={l}: {got} != oracle {want}"));
        }
    }
    Ok(format!("{} instances", cells.len()))
}

fn criterion_1(e: &Engine) -> Outcome {
    let cells: Vec<_> = grid(false).into_iter().filter(|c| c.1 <= 4).collect();
    against_oracle(e, &cells, Method::Main)
}

fn criterion_2(e: &Engine) -> Outcome {
    let cells: Vec<_> = grid(false).into_iter().filter(|c| c.1 == 5).collect();
    against_oracle(e, &cells, Method::Main)
}

fn criterion_3(e: &Engine) -> Outcome {
    let cells = grid(true);
    let zeros = cells.iter().filter(|c| c.2 == 0).count();
    against_oracle(e, &cells, Method::Koblitz).map(|s| format!("{s}, {zeros} with lambda = 0"))
}

fn criterion_4(e: &Engine) -> Outcome {
    let (mut relprime, mut ff, mut generators) = (0, 0, 0);
    for (p, n, l) in grid(false) {
        let inst = instance(p, n, l);
        let main = exact(e, &inst, Method::Main)?;
        if inst.d() == 1 {
            relprime += 1;
            if exact(e, &inst, Method::Relprime)? != main {
                return Err(format!("relprime differs from main at p={p} n={n} lambda={l}"));
            }
        }
        if (p - 1) % n == 0 {
            ff += 1;
            if exact(e, &inst, Method::Ff)? != main {
                return Err(format!("ff differs from main at p={p} n={n} lambda={l}"));
            }
            if l <= 2 {
                for alpha in (1..p - 1).filter(|a| num_gcd(*a, p - 1) == 1) {
                    let c = e
                        .count_with_generator(&inst, Method::Ff, alpha, PrecisionPolicy::default())
                        .map_err(|err| err.to_string())?;
                    if c.value.exact() != Some(&main) {
                        return Err(format!("ff with generator exponent {alpha} differs at p={p} n={n} lambda={l}"));
                    }
                }
                generators += 1;
            }
        }
    }
    if relprime == 0 || ff == 0 || generators < 3 {
        return Err(format!("too few instances: {relprime} relprime, {ff} ff, {generators} generator"));
    }
    Ok(format!("{relprime} relprime, {ff} ff, {generators} generator-invariance instances"))
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn sorted(mut v: Vec<Frac>) -> Vec<Frac> {
    v.sort();
    v
}

fn fracs(xs: &[(i64, i64)]) -> Vec<Frac> {
    sorted(xs.iter().map(|&(a, b)| frac(a, b)).collect())
}

fn criterion_5() -> Outcome {
    if instance(7, 4, 1).d() != 2 || instance(13, 4, 1).d() != 4 {
        return Err("d is not gcd(p - 1, 4)".into());
    }
    let mut w_types = BTreeMap::new();
    for w in enumerate_w(4, 2) {
        let mut key = w.entries().to_vec();
        key.sort_unstable();
        *w_types.entry(key).or_insert(0usize) += 1;
    }
    let expected_w = BTreeMap::from([(vec![0, 0, 0, 0], 1), (vec![0, 0, 1, 1], 6), (vec![1, 1, 1, 1], 1)]);
    if w_types != expected_w {
        return Err(format!("W for d = 2: {w_types:?}"));
    }

    let one = (1, 1);
    let shapes: [(u64, Vec<(Vec<u64>, usize, Vec<Frac>, Vec<Frac>)>); 2] = [
        (
            2,
            vec![
                (vec![0, 0, 0, 0], 1, fracs(&[(1, 2), (1, 4), (3, 4)]), fracs(&[one, one, one])),
                (vec![0, 0, 1, 1], 3, fracs(&[(1, 4), (3, 4)]), fracs(&[one, (1, 2)])),
            ],
        ),
        (
            4,
            vec![
                (vec![0, 0, 0, 0], 1, fracs(&[(1, 2), (1, 4), (3, 4)]), fracs(&[one, one, one])),
                (vec![0, 0, 1, 3], 12, fracs(&[(1, 2)]), fracs(&[one])),
                (vec![0, 0, 2, 2], 3, fracs(&[(1, 4), (3, 4)]), fracs(&[one, (1, 2)])),
            ],
        ),
    ];
    for (d, expected) in shapes {
        let mut seen: BTreeMap<Vec<u64>, (usize, Vec<Frac>, Vec<Frac>)> = BTreeMap::new();
        for c in canonical_classes(4, d) {
            if c.orbit_size != d as usize || !c.wstar.has_zero() {
                return Err(format!("class {:?} for d = {d} is malformed", c.wstar));
            }
            let pd = derive_params(&c.wstar, 4, d).map_err(|e| e.to_string())?;
            let mut key = c.wstar.entries().to_vec();
            key.sort_unstable();
            let entry = seen.entry(key).or_insert((0, sorted(pd.a.clone()), sorted(pd.b.clone())));
            if (sorted(pd.a), sorted(pd.b)) != (entry.1.clone(), entry.2.clone()) {
                return Err(format!("permuted classes of {:?} disagree on parameters", c.wstar));
            }
            entry.0 += 1;
        }
        let expected: BTreeMap<_, _> = expected.into_iter().map(|(k, m, a, b)| (k, (m, a, b))).collect();
        if seen != expected {
            return Err(format!("d = {d}: got {seen:?}"));
        }
    }
    Ok("n = 4, d = 2 and d = 4".into())
}

fn gamma<const K: u32>(p: u64) -> PadicGamma<u64> {
    PadicGamma::new(Arc::new(PadicContext::new(p, K).expect("u64 carrier fits")))
}

fn identity_gauss_pairs() -> Outcome {
    let mut checked = 0;
    for p in primes(3, 97) {
        let g = gamma::<4>(p);
        let ctx = g.ctx();
        for j in 0..p as i64 - 1 {
            let chi = CharExp::new(j, p);
            let a = gauss_gk(&g, chi).map_err(|e| e.to_string())?;
            let b = gauss_gk(&g, chi.conj()).map_err(|e| e.to_string())?;
            let got = gk_product(ctx, &[(a, 1), (b, 1)]).map_err(|e| e.to_string())?;
            let want = if j == 0 { ctx.one() } else { ctx.from_i64(chi.sign_at_minus_one() * p as i64) };
            if got != want {
                return Err(format!("g g-bar at p={p} j={j}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} characters"))
}

fn identity_reflection() -> Outcome {
    let mut checked = 0;
    for p in primes(3, 97) {
        for g in [gamma::<3>(p), gamma::<5>(p)] {
            let ctx = g.ctx();
            for r in 0..p {
                let x = frac(r as i64, p as i64 - 1);
                let lhs = ctx.unit_mul(&g.gamma_rational(&x).unwrap(), &g.gamma_rational(&(Frac::from_integer(1) - x)).unwrap());
                let x0 = if r == 0 { p } else { p - r };
                if lhs != ctx.sign_unit(x0 as i64) {
                    return Err(format!("reflection at p={p} r={r} K={}", ctx.precision()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} arguments"))
}

fn identity_multiplication() -> Outcome {
    let mut checked = 0;
    for p in primes(3, 31) {
        let g = gamma::<4>(p);
        let ctx = g.ctx();
        let gm = |x: Frac| g.gamma_rational(&x).unwrap();
        for m in [2i64, 3, 4, 6].into_iter().filter(|m| m % p as i64 != 0) {
            let constant = (1..m).fold(ctx.unit_one(), |acc, h| ctx.unit_mul(&acc, &gm(frac(h, m))));
            let t = ctx.teichmuller(m as u64).unwrap();
            for r in 0..p as i64 {
                let x = frac(r, p as i64 - 1);
                let lhs = (0..m).fold(ctx.unit_one(), |acc, h| ctx.unit_mul(&acc, &gm((x + h) / m)));
                // (1 - x)(1 - p) = r - (p - 1) is an integer on this domain
                let omega = ctx.unit_pow(&t, r - (p as i64 - 1));
                let rhs = ctx.unit_mul(&ctx.unit_mul(&omega, &gm(x)), &constant);
                if lhs != rhs {
                    return Err(format!("multiplication at p={p} m={m} r={r}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases"))
}

fn identity_shifted_products() -> Outcome {
    let mut checked = 0;
    for p in primes(3, 31) {
        let g = gamma::<4>(p);
        let ctx = g.ctx();
        let gm = |x: Frac| g.gamma_rational(&fract(&x)).unwrap();
        let q = p as i64 - 1;
        for n in (2..=6i64).filter(|n| n % p as i64 != 0) {
            let constant = (1..n).fold(ctx.unit_one(), |acc, h| ctx.unit_mul(&acc, &gm(frac(h, n))));
            let t = ctx.teichmuller(n as u64).unwrap();
            for j in 0..q {
                let omega = ctx.unit_pow(&t, -n * j);
                let lhs = ctx.unit_mul(&ctx.unit_mul(&gm(frac(-n * j, q)), &omega), &constant);
                let rhs = (0..n).fold(ctx.unit_one(), |acc, h| ctx.unit_mul(&acc, &gm(frac(1 + h, n) - frac(j, q))));
                if lhs != rhs {
                    return Err(format!("shifted gamma product at p={p} n={n} j={j}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases"))
}

fn identity_f_vs_g() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd3a7);
    let gammas: BTreeMap<u64, PadicGamma<u64>> = [5, 7, 11, 13].map(|p| (p, gamma::<6>(p))).into_iter().collect();
    let sets = 150;
    for _ in 0..sets {
        let p = [5u64, 7, 11, 13][rng.gen_range(0..4)];
        let g = &gammas[&p];
        let q = p as i64 - 1;
        let m = rng.gen_range(1..=3);
        let mut pick = || (0..m).map(|_| frac(rng.gen_range(0..=q), q)).collect::<Vec<_>>();
        let (a, b) = (pick(), pick());
        let params = GParams::new(a.clone(), b.clone()).unwrap();
        let f = FParams::from_gparams(&params, p).ok_or("parameters are not over p - 1")?;
        let t = rng.gen_range(1..p);
        let lhs = eval_f(g, &f, t).map_err(|e| e.to_string())?;
        let rhs = eval_g(g, &params, inv_mod_u64(t, p).unwrap()).map_err(|e| e.to_string())?;
        if !g.ctx().congruent(&lhs, &rhs) {
            return Err(format!("F != G(1/t) at p={p} a={a:?} b={b:?} t={t}"));
        }
    }
    Ok(format!("{sets} random parameter sets"))
}

fn jacobi_direct(ctx: &PadicContext<u64>, a: i64, b: i64) -> ValuedPadic<u64> {
    let p = ctx.p();
    (0..p).fold(ValuedPadic::exact_zero(), |acc, x| {
        ctx.add(&acc, &ctx.mul(&ctx.char_value(a, x), &ctx.char_value(b, (1 + p - x) % p)))
    })
}

fn identity_jacobi() -> Outcome {
    let mut checked = 0;
    for p in primes(3, 31) {
        let g = gamma::<4>(p);
        let ctx = g.ctx();
        let q = p as i64 - 1;
        for a in 0..q {
            for b in (0..q).filter(|b| (a + b) % q != 0) {
                let gs: Vec<_> =
                    [a, b, a + b].iter().map(|&j| gauss_gk(&g, CharExp::new(j, p)).unwrap()).collect();
                let via_gk = gk_product(ctx, &[(gs[0].clone(), 1), (gs[1].clone(), 1), (gs[2].clone(), -1)])
                    .map_err(|e| e.to_string())?;
                if !ctx.congruent(&via_gk, &jacobi_direct(ctx, a, b)) {
                    return Err(format!("Jacobi sum at p={p} a={a} b={b}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs"))
}

fn criterion_6() -> Outcome {
    let parts: [(&str, fn() -> Outcome); 6] = [
        ("a", identity_gauss_pairs),
        ("b", identity_reflection),
        ("c", identity_multiplication),
        ("d", identity_shifted_products),
        ("e", identity_f_vs_g),
        ("f", identity_jacobi),
    ];
    let mut notes = Vec::new();
    for (tag, f) in parts {
        notes.push(format!("({tag}) {}", f().map_err(|e| format!("({tag}) {e}"))?));
    }
    Ok(notes.join(", "))
}

fn criterion_7(e: &Engine) -> Outcome {
    let more = PrecisionPolicy { extra_digits: 2, ..PrecisionPolicy::default() };
    let cells = grid(false);
    for &(p, n, l) in &cells {
        let inst = instance(p, n, l);
        let base = e.count(&inst, Method::Main, PrecisionPolicy::default()).map_err(|err| err.to_string())?;
        if base.valuation.is_some_and(|v| v < 0) {
            return Err(format!("negative valuation at p={p} n={n} lambda={l}"));
        }
        let wider = e.count(&inst, Method::Main, more).map_err(|err| err.to_string())?;
        match (base.value.exact(), wider.value.exact()) {
            (Some(a), Some(b)) if a == b => {}
            _ => return Err(format!("reconstruction unstable at p={p} n={n} lambda={l}")),
        }
    }
    Ok(format!("{} instances", cells.len()))
}

fn verify_json(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dwork_cli::run_from(std::iter::once("dwork").chain(args.iter().copied()), &mut out, &mut err);
    if code != dwork_cli::EXIT_OK {
        return Err(format!("verify exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(String::from_utf8(out).expect("utf-8 output"))
}

fn criterion_8() -> Outcome {
    let mut lines = 0;
    for (pmax, nset) in [("31", "2,3,4"), ("13", "5")] {
        let base = ["verify", "--pmax", pmax, "--n-set", nset, "--lambda", "all", "--json", "--jobs"];
        let serial = verify_json(&[&base[..], &["1"]].concat())?;
        let parallel = verify_json(&[&base[..], &["4"]].concat())?;
        if serial != parallel {
            return Err(format!("reports differ for pmax {pmax}, n in {{{nset}}}"));
        }
        lines += serial.lines().count();
    }
    Ok(format!("{lines} report lines identical"))
}

fn main() {
    let engine = Engine::new();
    let criteria: [(u32, Box<dyn Fn() -> Outcome>); 8] = [
        (1, Box::new(|| criterion_1(&engine))),
        (2, Box::new(|| criterion_2(&engine))),
        (3, Box::new(|| criterion_3(&engine))),
        (4, Box::new(|| criterion_4(&engine))),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(|| criterion_7(&engine))),
        (8, Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {n}: PASS ({note}; {secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why}; {secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
