//! Scenario files and their execution.
//!
//! Scenarios are line-oriented structured text: `[section]` headers followed
//! by `key = value` lines. Repeated keys accumulate (multiplication-table
//! rows, ideal generators). The same file drives the library end to end and
//! produces a deterministic [`Report`].
//!
//! ```text
//! [scenario]
//! kind = envelope
//! max-degree = 3
//!
//! [group]
//! name = S3
//!
//! [ideal]
//! kind = reflection
//! ```

use crate::bundle::{
    build_intertwiners, finite_bundle_universal, multi_orbit_bundle, regular_bundle, u1_characters,
    u1_example, BundleCalculus, Connection, IntertwinerFamily,
};
use crate::dunkl::{
    build_dunkl_bundle_rank1, coaction_multiplicativity_check, commutator_check,
    equivariance_check, gradient_degeneration_check, hermitian_compatibility, Multiplicity,
};
use crate::envelope::Envelope;
use crate::fodc::{
    close_right_ideal, ker2_ideal, laurent_classical_fodc, reflection_fodc, trivial_ideal,
    universal_ideal, Fodc,
};
use crate::group::FiniteGroup;
use crate::hopf::{check_corepresentation, decompose_regular, HopfAlgebra};
use crate::linalg::{Matrix, SparseVec};
use crate::poly::Poly;
use crate::report::{Check, Report};
use crate::roots::RootSystem;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A parsed scenario: ordered sections of key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct Scenario {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<(String, Vec<(String, String)>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                sections.push((name.trim().to_string(), Vec::new()));
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "line {}: expected `key = value` or `[section]`, got {line:?}",
                    lineno + 1
                )));
            };
            let Some(section) = sections.last_mut() else {
                return Err(Error::Parse(format!(
                    "line {}: entry before any [section]",
                    lineno + 1
                )));
            };
            section
                .1
                .push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(Scenario { sections })
    }

    pub fn section(&self, name: &str) -> Option<&[(String, String)]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, kv)| kv.as_slice())
    }

    pub fn value(&self, section: &str, key: &str) -> Option<&str> {
        self.section(section)?
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn values<'a>(&'a self, section: &str, key: &str) -> Vec<&'a str> {
        self.section(section)
            .map(|kv| {
                kv.iter()
                    .filter(|(k, _)| k == key)
                    .map(|(_, v)| v.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Sets or replaces a key (used by CLI flag overrides).
    pub fn override_value(&mut self, section: &str, key: &str, value: &str) {
        if let Some((_, kv)) = self.sections.iter_mut().find(|(n, _)| n == section) {
            kv.retain(|(k, _)| k != key);
            kv.push((key.to_string(), value.to_string()));
        } else {
            self.sections.push((
                section.to_string(),
                vec![(key.to_string(), value.to_string())],
            ));
        }
    }

    pub fn kind(&self) -> Result<&str> {
        self.value("scenario", "kind")
            .ok_or_else(|| Error::Parse("missing [scenario] kind".into()))
    }

    pub fn seed(&self) -> Option<u64> {
        self.value("scenario", "seed").and_then(|s| s.parse().ok())
    }

    pub fn max_degree(&self, default: usize) -> Result<usize> {
        match self.value("scenario", "max-degree") {
            None => Ok(default),
            Some(s) => {
                let v: usize = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad max-degree {s:?}")))?;
                if v == 0 {
                    return Err(Error::Parse("max-degree must be positive".into()));
                }
                Ok(v)
            }
        }
    }
}

fn parse_i64(s: &str, what: &str) -> Result<i64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

/// Parses a rational like `3`, `-1/2`.
pub fn parse_rational(s: &str) -> Result<Scalar> {
    let (num, den) = match s.split_once('/') {
        None => (parse_i64(s, "rational")?, 1),
        Some((n, d)) => (parse_i64(n, "rational")?, parse_i64(d, "rational")?),
    };
    if den == 0 {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Scalar::from_ratio(num, den))
}

/// Parses a Gaussian coefficient: `2`, `-1/2`, `i`, `-i`, `3i`, `1/2i`.
pub fn parse_coeff(s: &str) -> Result<Scalar> {
    if let Some(re) = s.strip_suffix('i') {
        let re = re.trim();
        let im = match re {
            "" | "+" => Scalar::one(),
            "-" => Scalar::from_int(-1),
            other => parse_rational(other)?,
        };
        Ok(&im * &Scalar::i())
    } else {
        parse_rational(s)
    }
}

/// The coefficient algebra of a scenario: `[group]` (catalogue name or inline
/// tables, delta-basis in file order) or `[laurent]` with a window.
pub fn build_algebra(sc: &Scenario) -> Result<HopfAlgebra> {
    if let Some(kv) = sc.section("laurent") {
        let window = kv
            .iter()
            .find(|(k, _)| k == "window")
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Parse("[laurent] needs window = lo hi".into()))?;
        let parts: Vec<&str> = window.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse("window = lo hi".into()));
        }
        return HopfAlgebra::laurent(
            parse_i64(parts[0], "window")?,
            parse_i64(parts[1], "window")?,
        );
    }
    let group = build_group(sc)?;
    HopfAlgebra::function_algebra(group)
}

pub fn build_group(sc: &Scenario) -> Result<FiniteGroup> {
    if sc.section("group").is_none() {
        return Err(Error::Parse("missing [group] or [laurent] section".into()));
    }
    if let Some(name) = sc.value("group", "name") {
        return FiniteGroup::catalogue(name);
    }
    let elements: Vec<String> = sc
        .value("group", "elements")
        .ok_or_else(|| Error::Parse("[group] needs name or elements".into()))?
        .split_whitespace()
        .map(String::from)
        .collect();
    let rows = sc.values("group", "row");
    let mut mult = Vec::with_capacity(rows.len());
    for row in rows {
        let parsed: Result<Vec<usize>> = row
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad table entry {t:?}")))
            })
            .collect();
        mult.push(parsed?);
    }
    FiniteGroup::from_tables("scenario-group", elements, mult)
}

/// Resolves a basis label of the algebra: `z^3`-style Laurent monomials or
/// group element labels (with or without the `δ_` prefix).
fn resolve_label(h: &HopfAlgebra, token: &str) -> Result<usize> {
    let space = h.space();
    for i in 0..space.dim() {
        let l = space.label(i);
        if l == token || l.strip_prefix("δ_") == Some(token) {
            return Ok(i);
        }
    }
    Err(Error::Parse(format!("unknown basis label {token:?}")))
}

/// Parses a generator expression: whitespace-separated `coeff*label` terms.
pub fn parse_element(h: &HopfAlgebra, expr: &str) -> Result<SparseVec> {
    let mut out = SparseVec::zero();
    for term in expr.split_whitespace() {
        let (coeff, label) = match term.split_once('*') {
            Some((c, l)) => (parse_coeff(c)?, l),
            None => (Scalar::one(), term),
        };
        out.add_term(resolve_label(h, label)?, coeff);
    }
    Ok(out)
}

/// Builds the calculus requested by the `[ideal]` section.
pub fn build_fodc(sc: &Scenario, h: &HopfAlgebra) -> Result<Fodc> {
    let kind = sc.value("ideal", "kind").unwrap_or("universal");
    match kind {
        "universal" => Fodc::from_ideal(h, universal_ideal()),
        "trivial" => Fodc::from_ideal(h, trivial_ideal(h)?),
        "ker2" => {
            if h.is_laurent() {
                laurent_classical_fodc(h)
            } else {
                Fodc::from_ideal(h, ker2_ideal(h)?)
            }
        }
        "reflection" => {
            let group = h
                .group()
                .ok_or_else(|| Error::Parse("reflection calculus needs a finite group".into()))?;
            let tokens = sc.value("ideal", "reflections").ok_or_else(|| {
                Error::Parse("reflection calculus needs reflections = ...".into())
            })?;
            let mut subset = Vec::new();
            for t in tokens.split_whitespace() {
                subset.push(
                    group
                        .index_of(t)
                        .ok_or_else(|| Error::Parse(format!("unknown group element {t:?}")))?,
                );
            }
            reflection_fodc(group, &subset)
        }
        "generators" => {
            let gens: Result<Vec<SparseVec>> = sc
                .values("ideal", "generator")
                .into_iter()
                .map(|e| parse_element(h, e))
                .collect();
            Fodc::from_ideal(h, close_right_ideal(h, &gens?)?)
        }
        other => Err(Error::Parse(format!("unknown ideal kind {other:?}"))),
    }
}

/// The bundle requested by the `[bundle]` section, with its translation map.
pub struct BundleSetup {
    pub calc: BundleCalculus,
    pub families: Vec<IntertwinerFamily>,
    pub qtrs: crate::bundle::TranslationMap,
    pub kind: String,
}

pub fn build_bundle(sc: &Scenario) -> Result<BundleSetup> {
    let kind = sc
        .value("bundle", "kind")
        .ok_or_else(|| Error::Parse("missing [bundle] kind".into()))?;
    let cap = sc.max_degree(2)?;
    match kind {
        "regular" | "multi-orbit" => {
            let name = sc.value("bundle", "group").unwrap_or("Z2");
            let group = FiniteGroup::catalogue(name)?;
            let qpb = if kind == "regular" {
                regular_bundle(group)?
            } else {
                let copies = sc
                    .value("bundle", "orbits")
                    .map(|s| s.parse::<usize>().unwrap_or(2))
                    .unwrap_or(2);
                multi_orbit_bundle(group, copies)?
            };
            let calc = finite_bundle_universal(qpb, cap)?;
            let reps = decompose_regular(calc.qpb().hopf())?;
            let families: Result<Vec<IntertwinerFamily>> = reps
                .iter()
                .map(|r| build_intertwiners(calc.qpb(), r))
                .collect();
            let families = families?;
            let omega = Connection::canonical(&calc)?;
            let qtrs = calc.translation_map(&families, &omega)?;
            Ok(BundleSetup {
                calc,
                families,
                qtrs,
                kind: kind.to_string(),
            })
        }
        "u1-example" => {
            let window = sc.value("bundle", "window").unwrap_or("-5 5");
            let parts: Vec<&str> = window.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse("window = lo hi".into()));
            }
            let radius = parse_i64(parts[1], "window")?;
            let calc = u1_example(radius, cap)?;
            let chars = u1_characters(calc.qpb().hopf())?;
            let families: Result<Vec<IntertwinerFamily>> = chars
                .iter()
                .map(|r| build_intertwiners(calc.qpb(), r))
                .collect();
            let families = families?;
            let omega = Connection::canonical(&calc)?;
            let qtrs = calc.translation_map(&families, &omega)?;
            Ok(BundleSetup {
                calc,
                families,
                qtrs,
                kind: kind.to_string(),
            })
        }
        "dunkl" => {
            let window = sc.value("bundle", "line-window").unwrap_or("-4 4");
            let parts: Vec<&str> = window.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse("line-window = lo hi".into()));
            }
            let kappa = parse_rational(sc.value("bundle", "kappa").unwrap_or("1"))?;
            let bundle = build_dunkl_bundle_rank1(
                kappa,
                parse_i64(parts[0], "line-window")?,
                parse_i64(parts[1], "line-window")?,
                cap,
            )?;
            let (qtrs, _) = bundle.translation_maps()?;
            Ok(BundleSetup {
                calc: bundle.calc,
                families: Vec::new(),
                qtrs,
                kind: kind.to_string(),
            })
        }
        other => Err(Error::Parse(format!("unknown bundle kind {other:?}"))),
    }
}

/// Executes a scenario and assembles its report.
pub fn run(sc: &Scenario, path_label: &str) -> Result<Report> {
    let kind = sc.kind()?;
    let mut report = Report::new(path_label, kind);
    report.seed = sc.seed();
    match kind {
        "hopf-check" => {
            let h = build_algebra(sc)?;
            report.note("algebra", h.name());
            report.note("dimension", h.dim().to_string());
            report.extend(h.verify_axioms());
            if h.group().is_some() {
                match decompose_regular(&h) {
                    Ok(reps) => {
                        report.note("corepresentations", reps.len().to_string());
                        for r in &reps {
                            report.extend_prefixed(
                                &format!("corep.{}", r.name),
                                check_corepresentation(&h, r),
                            );
                        }
                    }
                    Err(Error::UnsupportedGroup(msg)) => {
                        report.note("corepresentations", format!("unsupported: {msg}"));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        "fodc" => {
            let h = build_algebra(sc)?;
            let f = build_fodc(sc, &h)?;
            report.note("algebra", h.name());
            report.note("germ-dimension", f.germ_dim().to_string());
            report.extend(f.verify_germ_identities());
        }
        "envelope" => {
            let h = build_algebra(sc)?;
            let f = build_fodc(sc, &h)?;
            let env = Envelope::new(f, sc.max_degree(3)?)?;
            for (k, d) in env.wedge_dims().iter().enumerate() {
                report.note(format!("wedge-dimension.{k}"), d.to_string());
            }
            report.extend(env.verify_laws());
        }
        "qpb" => {
            let setup = build_bundle(sc)?;
            let calc = &setup.calc;
            for n in 0..=calc.max_degree() {
                report.note(
                    format!("omega-dimension.{n}"),
                    calc.degree_dim(n).to_string(),
                );
                report.note(
                    format!("base-dimension.{n}"),
                    calc.base_forms(n).len().to_string(),
                );
                report.note(
                    format!("horizontal-dimension.{n}"),
                    calc.horizontal_forms(n)?.len().to_string(),
                );
            }
            report.extend(calc.verify_form_subalgebras()?);
            report.extend(calc.verify_qtrs_properties(&setup.qtrs)?);
            if setup.kind == "u1-example" {
                // base forms exist in degree one although dB = 0
                let db_zero = calc
                    .base_forms(0)
                    .iter()
                    .all(|b| calc.d(b).map(|v| v.is_zero()).unwrap_or(false));
                let base1 = calc.base_forms(1).len();
                let w = (!(db_zero && base1 == 1))
                    .then(|| format!("dB zero: {db_zero}, dim Ω¹(B) = {base1}"));
                report.push(Check::from_witness(
                    "base-forms-not-generated",
                    "dB = 0 while Ω¹(B) is one-dimensional",
                    w,
                ));
            }
        }
        "gauge" => {
            let setup = build_bundle(sc)?;
            let samples = sc
                .value("gauge", "samples")
                .map(|s| s.parse::<usize>().unwrap_or(20))
                .unwrap_or(20);
            let seed = sc
                .value("gauge", "seed")
                .and_then(|s| s.parse::<u64>().ok())
                .or(sc.seed())
                .unwrap_or(1);
            report.seed = Some(seed);
            let maps = crate::gauge::sample_gauge_maps(&setup.calc, samples, seed)?;
            report.note("samples", maps.len().to_string());
            for i in 0..maps.len() {
                report.note(
                    format!("sample.{i}.max-degree"),
                    setup.calc.max_degree().to_string(),
                );
            }
            report.note("max-degree-checked", setup.calc.max_degree().to_string());
            report.extend(crate::gauge::verify_group_isomorphism(
                &setup.calc,
                &setup.qtrs,
                &maps,
            )?);
        }
        "dunkl" => {
            run_dunkl(sc, &mut report)?;
        }
        other => return Err(Error::Parse(format!("unknown scenario kind {other:?}"))),
    }
    Ok(report)
}

fn root_system_of(sc: &Scenario) -> Result<(RootSystem, Multiplicity)> {
    let kind_s = sc.value("dunkl", "kind").unwrap_or("A");
    let kind = kind_s
        .chars()
        .next()
        .ok_or_else(|| Error::Parse("empty root system kind".into()))?;
    let rank = sc
        .value("dunkl", "rank")
        .map(|s| s.parse::<usize>().unwrap_or(1))
        .unwrap_or(1);
    let rs = RootSystem::build(kind, rank)?;
    let kappa = match sc.value("dunkl", "kappa") {
        None => Multiplicity::constant(&rs, Scalar::one()),
        Some(vals) => {
            let parsed: Result<Vec<Scalar>> = vals.split_whitespace().map(parse_rational).collect();
            Multiplicity::new(&rs, parsed?)?
        }
    };
    Ok((rs, kappa))
}

fn parse_direction(rs: &RootSystem, s: &str) -> Result<Vec<Scalar>> {
    let parts: Result<Vec<Scalar>> = s.split_whitespace().map(parse_rational).collect();
    let parts = parts?;
    if parts.len() != rs.dim {
        return Err(Error::Parse(format!(
            "direction needs {} coordinates",
            rs.dim
        )));
    }
    Ok(parts)
}

fn run_dunkl(sc: &Scenario, report: &mut Report) -> Result<()> {
    let mode = sc.value("dunkl", "mode").unwrap_or("commute");
    let (rs, kappa) = root_system_of(sc)?;
    report.note("root-system", format!("{}{}", rs.kind, rs.rank));
    report.note("positive-roots", rs.positive_count().to_string());
    let cap = sc
        .value("dunkl", "degree-cap")
        .map(|s| s.parse::<usize>().unwrap_or(4))
        .unwrap_or(4);
    match mode {
        "commute" => {
            let xi = match sc.value("dunkl", "direction") {
                Some(s) => parse_direction(&rs, s)?,
                None => {
                    let mut v = vec![Scalar::zero(); rs.dim];
                    v[0] = Scalar::one();
                    v
                }
            };
            let eta = match sc.value("dunkl", "direction2") {
                Some(s) => parse_direction(&rs, s)?,
                None => {
                    let mut v = vec![Scalar::zero(); rs.dim];
                    v[rs.dim - 1] = Scalar::one();
                    v
                }
            };
            report.push(commutator_check(&rs, &kappa, &xi, &eta, cap)?);
            report.push(gradient_degeneration_check(&rs, cap.min(5))?);
            report.push(equivariance_check(&rs, &kappa, cap.min(4))?);
            report.push(coaction_multiplicativity_check(&rs, cap.min(6))?);
        }
        "hermitian" => {
            // catalogue morphism pairs per rank
            if rs.dim == 1 {
                let x = Poly::var(1, 0);
                let gram = Matrix::identity(1);
                report.extend(hermitian_compatibility(
                    &rs,
                    &kappa,
                    &gram,
                    &[x.clone()],
                    &[x],
                )?);
            } else if rs.kind == 'A' && rs.rank == 2 {
                let x = Poly::var(3, 0);
                let y = Poly::var(3, 1);
                let z = Poly::var(3, 2);
                let t1 = vec![x.sub(&y), y.sub(&z)];
                let t2 = vec![x.mul(&x).sub(&y.mul(&y)), y.mul(&y).sub(&z.mul(&z))];
                let gram = Matrix::from_fn(2, 2, |r, c| Scalar::from_int([[2, -1], [-1, 2]][r][c]));
                report.extend(hermitian_compatibility(&rs, &kappa, &gram, &t1, &t2)?);
            } else {
                return Err(Error::Parse(
                    "hermitian scenarios cover rank 1 and A2".into(),
                ));
            }
        }
        "gauge" => {
            let kappa_val = parse_rational(sc.value("dunkl", "kappa").unwrap_or("1"))?;
            let bundle = build_dunkl_bundle_rank1(kappa_val, -4, 4, sc.max_degree(2)?)?;
            report.push(bundle.qtrs_choice_independence()?);
            report.push(bundle.gauge_transforms_canonical_connection()?);
            let big = bundle.canonical_gauge()?;
            report.extend(big.verify(&bundle.calc)?);
            // roundtrip through the convolution picture
            let f = bundle.canonical_gauge_map()?;
            let (qtrs, _) = bundle.translation_maps()?;
            let back = crate::gauge::map_from_automorphism(&bundle.calc, &qtrs, &big)?;
            let w = (back != f).then(|| "f_{F_λ} ≠ f_λ".to_string());
            report.push(Check::from_witness(
                "canonical-gauge-roundtrip",
                "the canonical gauge is a convolution-invertible map",
                w,
            ));
        }
        other => return Err(Error::Parse(format!("unknown dunkl mode {other:?}"))),
    }
    Ok(())
}

/// Stable catalogue listing for the CLI.
pub fn catalogue_listing() -> String {
    let mut out = String::new();
    out.push_str("groups:\n");
    for name in FiniteGroup::catalogue_names() {
        let g = FiniteGroup::catalogue(name).expect("catalogue");
        out.push_str(&format!("  {name} (order {})\n", g.order()));
    }
    out.push_str("corepresentation tables:\n");
    for name in ["Z1", "Z2", "Z4", "S3", "D4"] {
        let h = HopfAlgebra::function_algebra(FiniteGroup::catalogue(name).expect("catalogue"))
            .expect("algebra");
        let reps = decompose_regular(&h).expect("catalogue coreps");
        let dims: Vec<String> = reps
            .iter()
            .map(|r| format!("{}:{}", r.name, r.dim))
            .collect();
        out.push_str(&format!("  {name}: {}\n", dims.join(" ")));
    }
    out.push_str("root systems:\n");
    for (kind, ranks) in [('A', 1..=5), ('B', 1..=4), ('D', 2..=4)] {
        for rank in ranks {
            let rs = RootSystem::build(kind, rank).expect("catalogue root system");
            out.push_str(&format!(
                "  {kind}{rank} ({} positive roots, ambient dim {})\n",
                rs.positive_count(),
                rs.dim
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections_and_values() {
        let sc = Scenario::parse(
            "# comment\n[scenario]\nkind = fodc\nseed = 9\n[laurent]\nwindow = -3 3\n[ideal]\nkind = ker2\n",
        )
        .unwrap();
        assert_eq!(sc.kind().unwrap(), "fodc");
        assert_eq!(sc.seed(), Some(9));
        assert_eq!(sc.value("laurent", "window"), Some("-3 3"));
    }

    #[test]
    fn parse_rejects_stray_lines() {
        assert!(Scenario::parse("kind = x\n").is_err());
        assert!(Scenario::parse("[s]\nnot a pair\n").is_err());
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!(parse_coeff("3/2").unwrap(), Scalar::from_ratio(3, 2));
        assert_eq!(parse_coeff("i").unwrap(), Scalar::i());
        assert_eq!(parse_coeff("-i").unwrap(), -Scalar::i());
        assert_eq!(
            parse_coeff("-1/2i").unwrap(),
            &Scalar::from_ratio(-1, 2) * &Scalar::i()
        );
        assert!(parse_coeff("1/0").is_err());
    }

    #[test]
    fn run_fodc_scenario_on_laurent() {
        let sc = Scenario::parse(
            "[scenario]\nkind = fodc\n[laurent]\nwindow = -3 3\n[ideal]\nkind = ker2\n",
        )
        .unwrap();
        let report = run(&sc, "inline").unwrap();
        assert!(report.all_passed(), "{}", report.render());
    }

    #[test]
    fn run_generator_ideal_scenario() {
        let sc = Scenario::parse(
            "[scenario]\nkind = fodc\n[laurent]\nwindow = -5 5\n[ideal]\nkind = generators\ngenerator = 1*z^2 -2*z 1*1\n",
        )
        .unwrap();
        let report = run(&sc, "inline").unwrap();
        assert!(report.all_passed(), "{}", report.render());
        assert_eq!(
            report
                .info
                .iter()
                .find(|(k, _)| k == "germ-dimension")
                .map(|(_, v)| v.as_str()),
            Some("1")
        );
    }

    #[test]
    fn run_u1_qpb_scenario_has_the_named_check() {
        let sc = Scenario::parse(
            "[scenario]\nkind = qpb\nmax-degree = 2\n[bundle]\nkind = u1-example\nwindow = -4 4\n",
        )
        .unwrap();
        let report = run(&sc, "inline").unwrap();
        assert!(report.all_passed(), "{}", report.render());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "base-forms-not-generated" && c.passed));
    }

    #[test]
    fn reflection_scenario_with_bad_subset_is_a_parse_level_failure() {
        let sc = Scenario::parse(
            "[scenario]\nkind = fodc\n[group]\nname = S3\n[ideal]\nkind = reflection\nreflections = (12)\n",
        )
        .unwrap();
        assert!(matches!(
            run(&sc, "inline"),
            Err(Error::NotConjugationClosed(_))
        ));
    }

    #[test]
    fn gauge_scenario_is_deterministic() {
        let text = "[scenario]\nkind = gauge\nmax-degree = 2\n[bundle]\nkind = regular\ngroup = Z2\n[gauge]\nsamples = 4\nseed = 5\n";
        let sc = Scenario::parse(text).unwrap();
        let a = run(&sc, "inline").unwrap().render();
        let b = run(&sc, "inline").unwrap().render();
        assert_eq!(a, b);
        assert!(a.contains("roundtrip"));
    }

    #[test]
    fn inline_group_tables_define_the_algebra() {
        // Z3 written out explicitly; delta-basis order follows the file
        let sc = Scenario::parse(
            "[scenario]\nkind = hopf-check\n[group]\nelements = e a b\nrow = 0 1 2\nrow = 1 2 0\nrow = 2 0 1\n",
        )
        .unwrap();
        let report = run(&sc, "inline").unwrap();
        assert!(report.all_passed(), "{}", report.render());
        let h = build_algebra(&sc).unwrap();
        assert_eq!(h.space().label(0), "δ_e");
        assert_eq!(h.space().label(1), "δ_a");
    }

    #[test]
    fn catalogue_lists_the_expected_entries() {
        let listing = catalogue_listing();
        assert!(listing.contains("Z2"));
        assert!(listing.contains("A2"));
        assert!(listing.contains("std2:2"));
    }
}
