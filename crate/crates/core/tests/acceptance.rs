//! Acceptance run: one line per criterion.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use ncgarside::affine_mcsul::McSul;
use ncgarside::annulus_model::{default_orientations, dual_path, verify_type_a, verify_type_b, verify_type_d, Annulus};
use ncgarside::chain_system::{poset_to_chain_system, ChainSystem};
use ncgarside::finite_nc::{coxeter_chain_system, nc_lattice, verify_word_criteria};
use ncgarside::linalg::Q;
use ncgarside::report::{Check, Status};
use ncgarside::root_datum::{parse_named, RootDatum};
use ncgarside::tube_combinatorics::{
    compare_with_type_b, ext_nonzero, hom_nonzero, verify_f_vanishing, verify_omega_iso, TubeLetter, Tubes,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn datum(name: &str) -> RootDatum {
    parse_named(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn checks_ok(label: &str, checks: &[Check]) -> Outcome {
    match checks.iter().find(|c| c.status != Status::Pass) {
        None => Ok(()),
        Some(c) => Err(format!("{label}: {} {:?} {}", c.name, c.status, c.witness.clone().unwrap_or_default())),
    }
}

fn chain_axioms() -> Outcome {
    let bad = ChainSystem::from_strs(&["a", "b c"]);
    let rep = bad.check_axioms();
    let iii = rep.check("condition_iii").ok_or("no condition_iii check")?;
    require(iii.status == Status::Fail && iii.witness.is_some(), || "{a, bc} not rejected by (iii)".into())?;
    let good = ChainSystem::from_strs(&["a b", "b a"]);
    require(good.check_axioms().passes(), || "{ab, ba} rejected".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..50 {
        let c = common::random_valid_system(&mut rng);
        require(c.check_axioms().passes(), || format!("sample {i} invalid"))?;
        let p = c.build_poset().map_err(|e| e.to_string())?;
        let back = poset_to_chain_system(&p).map_err(|e| e.to_string())?;
        require(back == c, || format!("sample {i} did not round trip: {:?}", c.words()))?;
    }
    Ok(())
}

fn finite_type() -> Outcome {
    let cases = [
        ("A2", common::reduced_factorization_count(3, 2, 6), common::nc_count_a(3)),
        ("B2", common::reduced_factorization_count(4, 2, 8), common::nc_count_b(2)),
        ("A3", common::reduced_factorization_count(4, 3, 24), common::nc_count_a(4)),
    ];
    for (name, orbit, lattice) in cases {
        let d = datum(name);
        let c = coxeter_chain_system(&d).map_err(|e| e.to_string())?;
        let p = nc_lattice(&d).map_err(|e| e.to_string())?;
        require(c.len() as u64 == orbit && p.len() == lattice, || {
            format!("{name}: orbit {} (want {orbit}), lattice {} (want {lattice})", c.len(), p.len())
        })?;
    }
    for name in ["A2", "A3", "B2", "B3"] {
        checks_ok(name, &verify_word_criteria(&datum(name)).map_err(|e| e.to_string())?)?;
    }
    Ok(())
}

fn garside() -> Outcome {
    for name in ["A3", "B3"] {
        let c = coxeter_chain_system(&datum(name)).map_err(|e| e.to_string())?;
        let rep = c.is_garside(&c.unit_weights()).map_err(|e| e.to_string())?;
        checks_ok(name, &rep.checks)?;
    }
    for name in ["A~3:outer=1,3", "D~4"] {
        let ms = McSul::new(&datum(name), None).map_err(|e| e.to_string())?;
        let ccf = ms.build_ccf().map_err(|e| e.to_string())?;
        let w = ms.weights();
        let m = Q::new(2, ms.hd.m as i64);
        require(w.iter().all(|(l, q)| *q == if l.as_str().starts_with('f') { m } else { Q::from_integer(1) }), || {
            format!("{name}: weights are not (1, 2/m)")
        })?;
        checks_ok(name, &ccf.is_garside(&w).map_err(|e| e.to_string())?.checks)?;
    }
    Ok(())
}

/// Tube ranks from orbit sizes: a tube of rank `r` gives `r - 1` orbits of size `r`.
fn ranks_from_orbits(sizes: &[usize]) -> Vec<usize> {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in sizes {
        *count.entry(s).or_default() += 1;
    }
    let mut out = Vec::new();
    for (r, c) in count {
        out.extend(std::iter::repeat(r).take(c / (r - 1)));
    }
    out
}

fn mcsul_structure() -> Outcome {
    for (name, outer) in [("A~3:outer=1,3", Some(vec![1, 3])), ("A~3:outer=1,2", Some(vec![1, 2])), ("D~4", None)] {
        let d = datum(name);
        let mut ranks = ranks_from_orbits(&common::horizontal_orbits(&d));
        if let Some(o) = outer {
            let an = Annulus::new(4, &o).map_err(|e| e.to_string())?;
            let mut sides = vec![an.side_rank(o[0]), an.side_rank((1..=4).find(|x| !o.contains(x)).unwrap())];
            sides.sort();
            require(sides == ranks, || format!("{name}: annulus sides {sides:?} vs roots {ranks:?}"))?;
        }
        ranks.sort();
        let ms = McSul::new(&d, None).map_err(|e| e.to_string())?;
        let s = ms.summary();
        let mut got = ms.hd.ranks();
        got.sort();
        let n = d.n();
        let m = ranks.len();
        let th: usize = ranks.iter().map(|r| r * (r - 1)).sum();
        require(got == ranks && s.m == m, || format!("{name}: ranks {got:?}, want {ranks:?}"))?;
        require(s.xi.len() == n - 2 + m && s.f_size == s.xi.len() && s.th_size == th, || {
            format!("{name}: |Xi| {}, |F| {}, |T_H| {}", s.xi.len(), s.f_size, s.th_size)
        })?;
        let ccf = ms.build_ccf().map_err(|e| e.to_string())?;
        checks_ok(name, &ms.verify_ccf_words(&ccf))?;
        for w in ccf.words() {
            let f = w.iter().filter(|l| l.as_str().starts_with('f')).count();
            let weight = ccf.weight(w, &ms.weights());
            require(f == m && w.len() - f == n - 2 && weight == Q::from_integer(n as i64), || {
                format!("{name}: bad word {w:?}")
            })?;
        }
    }
    Ok(())
}

fn good_bij() -> Outcome {
    for name in ["A~3:outer=1,3", "A~4:outer=1,2", "A~4:outer=1,3", "D~4", "F~4"] {
        let ms = McSul::new(&datum(name), None).map_err(|e| e.to_string())?;
        checks_ok(name, &ms.consistency)?;
        checks_ok(name, &ms.verify_good_bij())?;
    }
    Ok(())
}

fn para_exceptional() -> Outcome {
    let ms = McSul::new(&datum("A~3:outer=1,3"), None).map_err(|e| e.to_string())?;
    let ccf = ms.build_ccf().map_err(|e| e.to_string())?;
    let t = Tubes::from_horizontal(&ms.hd, &ms.datum).map_err(|e| e.to_string())?;
    let rpe = t.chain_system().map_err(|e| e.to_string())?;
    require(rpe.len() == 96 && ccf.len() == 96, || format!("|C_rpe| {}, |C_c^F| {}", rpe.len(), ccf.len()))?;
    checks_ok("rpe", &t.verify(&rpe).map_err(|e| e.to_string())?)?;
    checks_ok("omega", &verify_omega_iso(&ms).map_err(|e| e.to_string())?)?;
    let m = t.ranks.len();
    let index = t.letter_index();
    for w in rpe.words() {
        let mut per_tube = vec![0; m];
        for l in w {
            let x = index[l];
            if x.is_f() {
                per_tube[x.tube] += 1;
            }
        }
        require(w.len() == ms.datum.n() - 2 + m && per_tube.iter().all(|&c| c == 1), || format!("word {w:?}"))?;
    }
    Ok(())
}

fn tube_type_b() -> Outcome {
    for (r, want) in [(2usize, 4usize), (3, 27), (4, 256)] {
        checks_ok(&format!("rank {r}"), &compare_with_type_b(r).map_err(|e| e.to_string())?)?;
        let tube = Tubes::single(r).map_err(|e| e.to_string())?.tube_chain_system(0).map_err(|e| e.to_string())?;
        let b = coxeter_chain_system(&datum(&format!("B{r}"))).map_err(|e| e.to_string())?;
        let formula = common::reduced_factorization_count(2 * r as u64, r as u64, (1..=r as u64).product::<u64>() << r);
        require(tube.len() == want && b.len() == want && formula == want as u64, || {
            format!("rank {r}: tube {}, NC(B) {}, formula {formula}", tube.len(), b.len())
        })?;
        let pt = tube.build_poset().map_err(|e| e.to_string())?;
        let pb = b.build_poset().map_err(|e| e.to_string())?;
        require(pt.isomorphic_unlabeled(&pb).map_err(|e| e.to_string())?, || format!("rank {r}: not isomorphic"))?;
    }
    Ok(())
}

fn hom_ext_oracle() -> Outcome {
    for r in 1..=4usize {
        for b in 0..r {
            for k in 1..=2 * r {
                for c in 0..r {
                    for l in 1..=2 * r {
                        let (h, e) = common::quiver_hom_ext(r, (b, k), (c, l));
                        let x = TubeLetter::new(0, r, b, k);
                        let y = TubeLetter::new(0, r, c, l);
                        require((h > 0) == hom_nonzero(&x, &y) && (e > 0) == ext_nonzero(&x, &y), || {
                            format!("rank {r}: ({b},{k}) -> ({c},{l}) hom {h} ext {e}")
                        })?;
                    }
                }
            }
        }
        for g in 0..r {
            for b in 0..r {
                for k in 1..r {
                    let (h1, e1) = common::quiver_hom_ext(r, (g, r), (b, k));
                    let into = !(0..k).any(|i| (b + i) % r == g);
                    let (h2, e2) = common::quiver_hom_ext(r, (b, k), (g, r));
                    let out = !(1..=k).any(|i| (b + i) % r == g);
                    require((h1 + e1 == 0) == into && (h2 + e2 == 0) == out, || {
                        format!("rank {r}: F{g} against ({b},{k})")
                    })?;
                }
            }
        }
        checks_ok(&format!("rank {r}"), &verify_f_vanishing(r, 2 * r))?;
    }
    Ok(())
}

fn dual_paths() -> Outcome {
    for n in [4i64, 6, 8] {
        for outer in default_orientations(n) {
            let label = format!("n={n} outer={outer:?}");
            checks_ok(&label, &verify_type_a(n, &outer).map_err(|e| e.to_string())?)?;
            checks_ok(&label, &dual_path(n, &outer).map_err(|e| e.to_string())?)?;
        }
    }
    for n in [5, 6] {
        checks_ok(&format!("B~ n={n}"), &verify_type_b(n).map_err(|e| e.to_string())?)?;
    }
    checks_ok("D~ n=6", &verify_type_d(6).map_err(|e| e.to_string())?)?;
    Ok(())
}

fn q_independence() -> Outcome {
    let d = datum("A~3:outer=1,3");
    let a = McSul::new(&d, Some(vec![Q::new(1, 2), Q::new(1, 2)])).map_err(|e| e.to_string())?;
    let b = McSul::new(&d, Some(vec![Q::new(1, 3), Q::new(2, 3)])).map_err(|e| e.to_string())?;
    let map = a.natural_letter_map(&b).ok_or("no natural letter map")?;
    let pa = a.ccf_poset().map_err(|e| e.to_string())?;
    let pb = b.ccf_poset().map_err(|e| e.to_string())?;
    require(pa.len() == pb.len(), || format!("sizes {} vs {}", pa.len(), pb.len()))?;
    require(pa.isomorphic_labeled(&pb, Some(&map)).map_err(|e| e.to_string())?, || "not isomorphic".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("chain-system axioms", 5, chain_axioms),
        ("finite type orbits, lattices and word criteria", 30, finite_type),
        ("garside fragment", 60, garside),
        ("factored translation structure", 60, mcsul_structure),
        ("closed form equals interval membership", 600, good_bij),
        ("para-exceptional chain system and omega", 60, para_exceptional),
        ("tube versus type B", 120, tube_type_b),
        ("hom/ext oracle", 60, hom_ext_oracle),
        ("dual-path agreement", 120, dual_paths),
        ("q-independence", 30, q_independence),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let el = t.elapsed();
        let out = out.and_then(|()| {
            require(el <= Duration::from_secs(*budget), || format!("took {:.1?}, budget {budget} s", el))
        });
        match out {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({:.2?})", i + 1, el),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({:.2?}): {e}", i + 1, el);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
