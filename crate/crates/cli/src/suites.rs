//! One function per verb, each building a report.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use ncgarside::affine_mcsul::{McSul, DEFAULT_HURWITZ_BOUND};
use ncgarside::annulus_model::{self, Flavor};
use ncgarside::chain_system::ChainSystem;
use ncgarside::finite_nc::{coxeter_chain_system, hurwitz_orbit, defining_word, verify_word_criteria};
use ncgarside::linalg::Q;
use ncgarside::report::Check;
use ncgarside::root_datum::{classify, parse_cartan_file, parse_named, root_name, RootDatum, TypeTag};
use ncgarside::tube_combinatorics::{self as tubes, Tubes};

use crate::report::Report;

pub struct Datum {
    pub spec: Option<String>,
    pub cartan: Option<String>,
    pub cox: Option<String>,
}

impl Datum {
    pub fn load(&self) -> Result<RootDatum> {
        match (&self.spec, &self.cartan) {
            (Some(t), None) => {
                let name = match &self.cox {
                    Some(c) => format!("{t}:cox={c}"),
                    None => t.clone(),
                };
                Ok(parse_named(&name)?)
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                let name = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("cartan");
                Ok(parse_cartan_file(&text, name)?)
            }
            (Some(_), Some(_)) => bail!("give either --type or --cartan, not both"),
            (None, None) => bail!("a root datum is required: --type or --cartan"),
        }
    }
}

pub fn parse_q(text: &str) -> Result<Vec<Q>> {
    text.split(',')
        .map(|t| t.trim().parse::<Q>().map_err(|_| anyhow!("bad rational {t:?}")))
        .collect()
}

fn is_extended_type(d: &RootDatum) -> bool {
    d.tag == TypeTag::Affine && d.name.trim_start().to_ascii_uppercase().starts_with('E')
}

pub fn gate(d: &RootDatum, extended: bool) -> Result<()> {
    if is_extended_type(d) && !extended {
        bail!("{} is only run with --extended", d.name);
    }
    Ok(())
}

fn timed<T>(r: &mut Report, key: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    r.timings_ms.insert(key.to_string(), t.elapsed().as_millis());
    out
}

pub fn classify_report(d: &RootDatum) -> Report {
    let mut r = Report::new("classify");
    r.meta("type", &d.name);
    r.meta("class", d.tag.to_string());
    r.meta("n", d.n());
    r.meta("cox_word", d.cox_word.iter().map(|i| i + 1).collect::<Vec<_>>());
    let tag = classify(&d.cartan);
    r.checks.push(Check::from_result(
        "classification_consistent",
        if tag == d.tag { Ok(()) } else { Err(format!("{tag} vs {}", d.tag)) },
    ));
    if let Some(delta) = &d.delta {
        r.meta("delta", delta);
        if let Ok(hd) = ncgarside::affine_mcsul::compute_xi(d) {
            r.meta("m", hd.m);
            r.meta("tube_ranks", hd.ranks());
            r.meta("xi", hd.xi.iter().map(|x| root_name(x)).collect::<Vec<_>>());
            r.meta("th_size", hd.th_roots.len());
        }
    }
    r
}

pub fn nc_report(d: &RootDatum) -> Result<Report> {
    let mut r = Report::new("nc");
    r.meta("type", &d.name);
    let c = timed(&mut r, "orbit", || hurwitz_orbit(d, &defining_word(d)))?;
    r.meta("orbit_size", c.len());
    let p = timed(&mut r, "lattice", || c.build_poset())?;
    r.meta("lattice_size", p.len());
    r.meta("cover_count", p.covers().len());
    let ax = c.check_axioms();
    r.extend("axioms", ax.checks);
    let criteria = timed(&mut r, "criteria", || verify_word_criteria(d))?;
    r.extend("criteria", criteria);
    Ok(r)
}

pub fn mcsul_report(d: &RootDatum, q: Option<Vec<Q>>, ttprime: bool, bound: Option<usize>) -> Result<Report> {
    let mut r = Report::new("mcsul-verify");
    let ms = timed(&mut r, "build", || McSul::new(d, q))?;
    let s = ms.summary();
    r.meta("summary", &s);
    r.meta("tube_ranks", ms.hd.ranks());
    r.meta("q", ms.q.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    let ccf = timed(&mut r, "ccf", || ms.build_ccf())?;
    r.meta("ccf_words", ccf.len());
    r.extend("consistency", ms.consistency.clone());
    r.extend("good_bij", ms.verify_good_bij());
    r.extend("ccf", ms.verify_ccf_words(&ccf));
    r.extend("relation", [ms.verify_relation(&ccf)]);
    if ttprime {
        r.extend("ttprime", [ms.verify_ttprime(&ccf, bound.unwrap_or(DEFAULT_HURWITZ_BOUND))]);
    }
    Ok(r)
}

pub fn rpe_report(d: &RootDatum, q: Option<Vec<Q>>) -> Result<Report> {
    let mut r = Report::new("rpe");
    r.meta("type", &d.name);
    let ms = timed(&mut r, "mcsul", || McSul::new(d, q))?;
    let t = Tubes::from_horizontal(&ms.hd, &ms.datum)?;
    let c = timed(&mut r, "rpe", || t.chain_system())?;
    r.meta("rpe", t.summary(&c));
    r.extend("rpe", t.verify(&c)?);
    let omega = timed(&mut r, "omega", || tubes::verify_omega_iso(&ms))?;
    r.extend("omega", omega);
    Ok(r)
}

pub fn tubes_report(rank: usize, max_k: Option<usize>) -> Result<Report> {
    let mut r = Report::new("tubes");
    r.meta("rank", rank);
    let t = Tubes::single(rank)?;
    let c = t.tube_chain_system(0)?;
    r.meta("alphabet", t.letters().len());
    r.meta("maximal_words", c.len());
    let p = timed(&mut r, "poset", || tubes::tube_poset(rank))?;
    r.meta("poset_size", p.len());
    r.extend("tube", t.verify(&c)?);
    let tb = timed(&mut r, "type_b", || tubes::compare_with_type_b(rank))?;
    r.extend("type_b", tb);
    let k = max_k.unwrap_or(2 * rank);
    r.extend("hom_ext", [tubes::verify_against_oracle(rank, k)]);
    r.extend("hom_ext", tubes::verify_f_vanishing(rank, k));
    Ok(r)
}

pub enum AnnulusTask {
    VerifyA { n: i64, outer: Vec<i64> },
    VerifyB { n: i64 },
    VerifyD { n: i64 },
    Dual { n: i64, outer: Vec<i64> },
    Parse { text: String, flavor: Flavor, n: i64 },
}

pub fn annulus_report(task: AnnulusTask) -> Result<Report> {
    let mut r = Report::new("annulus");
    match task {
        AnnulusTask::VerifyA { n, outer } => {
            r.meta("n", n);
            r.meta("outer", &outer);
            let an = annulus_model::Annulus::new(n, &outer)?;
            r.meta("coxeter", an.coxeter().to_string());
            r.extend("type_a", annulus_model::verify_type_a(n, &outer)?);
        }
        AnnulusTask::VerifyB { n } => {
            r.meta("n", n);
            r.extend("type_b", annulus_model::verify_type_b(n)?);
        }
        AnnulusTask::VerifyD { n } => {
            r.meta("n", n);
            r.extend("type_d", annulus_model::verify_type_d(n)?);
        }
        AnnulusTask::Dual { n, outer } => {
            r.meta("n", n);
            r.meta("outer", &outer);
            let dual = timed(&mut r, "dual", || annulus_model::dual_path(n, &outer))?;
            r.extend("dual", dual);
        }
        AnnulusTask::Parse { text, flavor, n } => {
            let p = annulus_model::parse_cycles(&text, flavor, n)?;
            r.meta("canonical", p.to_string());
            if flavor == Flavor::Plain {
                r.meta("window", p.window());
            }
            r.meta("monotone_infinite_cycles", annulus_model::is_monotone_infinite_cycle(&p));
            let again = annulus_model::parse_cycles(&p.to_string(), flavor, n)?;
            r.checks.push(Check::from_result(
                "round_trip",
                if again == p { Ok(()) } else { Err(again.to_string()) },
            ));
        }
    }
    Ok(r)
}

pub enum GarsideInput {
    Datum(RootDatum, Option<Vec<Q>>),
    Chain(ChainSystem),
}

pub fn garside_report(input: GarsideInput, bound: usize) -> Result<Report> {
    let mut r = Report::new("garside-check");
    let (c, weights) = match input {
        GarsideInput::Chain(c) => {
            let w = c.unit_weights();
            (c, w)
        }
        GarsideInput::Datum(d, q) => {
            r.meta("type", &d.name);
            match d.tag {
                TypeTag::Finite => {
                    let c = coxeter_chain_system(&d)?;
                    let w = c.unit_weights();
                    (c, w)
                }
                TypeTag::Affine => {
                    let ms = McSul::new(&d, q)?;
                    r.meta("m", ms.hd.m);
                    (ms.build_ccf()?, ms.weights())
                }
                TypeTag::Other => bail!("{} is neither finite nor affine", d.name),
            }
        }
    };
    r.meta("words", c.len());
    let rep = timed(&mut r, "garside", || c.is_garside_bounded(&weights, bound))?;
    r.extend("garside", rep.checks);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_parsing() {
        assert_eq!(parse_q("1/3, 2/3").unwrap(), vec![Q::new(1, 3), Q::new(2, 3)]);
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn extended_gate() {
        let d = parse_named("E~6").unwrap();
        assert!(gate(&d, false).is_err());
        assert!(gate(&d, true).is_ok());
        assert!(gate(&parse_named("D~4").unwrap(), false).is_ok());
    }
}
