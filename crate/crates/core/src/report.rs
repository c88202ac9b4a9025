//! JSON reports assembled from the individual analyses. Field order and array
//! order are fixed, so identical inputs serialize to identical bytes.

use serde::Serialize;

use crate::binform::{BinaryForm, FormJson, PointP1};
use crate::birgeom::{
    decide_maximality, enumerate_links, validate_link, LinkCertificate, LinkEnumeration,
    MaximalityVerdict,
};
use crate::error::Result;
use crate::fibration::{
    automorphism_profile, build_fibration, orbit_census, picard_mori, FiberClass, HorizontalPart,
    UmemuraFibration,
};
use crate::resolution::{
    classify_extractions, resolve_fibration, ExtractionClassification, ResolutionLedger,
};

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InputEcho {
    pub n: usize,
    pub form: FormJson,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    /// `c g = f^2 h`
    pub c: String,
    pub f: FormJson,
    pub h: FormJson,
    pub distinct_roots: usize,
    pub distinct_roots_of_h: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularPointView {
    pub point: String,
    pub multiplicity: u32,
    /// Local unit, ascending coefficients.
    pub gamma: Vec<String>,
    pub gamma_exact: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PicardMoriView {
    pub intersection_matrix: [[i64; 2]; 2],
    pub canonical_class: [i64; 2],
    pub k_dot_e: i64,
    pub k_dot_sigma: i64,
    pub k_dot_e_adjunction: i64,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AutProfileView {
    pub vertical_group: String,
    pub vertical_dimension: usize,
    /// `Trivial`, `OneParameter` or `FullPgl2`.
    pub horizontal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<[i64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate_change: Option<[String; 4]>,
    pub ambient_vertical_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitView {
    /// `generic` or the key of a root.
    pub fiber: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<u32>,
    pub label: String,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitCensusView {
    pub strata: Vec<OrbitView>,
    pub full_description: bool,
}

/// A reference value that differs from the computed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Discrepancy {
    pub reference: String,
    pub printed_value: String,
    pub computed_value: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkReport {
    #[serde(flatten)]
    pub enumeration: LinkEnumeration,
    /// One per link; `null` for `ProductNoLinks`.
    pub certificates: Vec<Option<LinkCertificate>>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub input: InputEcho,
    pub decomposition: Decomposition,
    pub singular_locus: Vec<SingularPointView>,
    pub resolution_ledgers: Vec<ResolutionLedger>,
    pub picard_mori: PicardMoriView,
    pub aut_profile: AutProfileView,
    pub orbit_census: OrbitCensusView,
    pub links: LinkReport,
    pub maximality: MaximalityVerdict,
    pub printed_discrepancies: Vec<Discrepancy>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolveReport {
    pub input: InputEcho,
    pub resolution_ledgers: Vec<ResolutionLedger>,
    pub extractions: Vec<ExtractionClassification>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CensusReport {
    pub input: InputEcho,
    pub aut_profile: AutProfileView,
    pub orbit_census: OrbitCensusView,
}

fn echo(x: &UmemuraFibration) -> InputEcho {
    InputEcho {
        n: x.n(),
        form: x.g().to_json(),
    }
}

pub fn decomposition(g: &BinaryForm) -> Result<Decomposition> {
    let d = g.squarefree_decompose()?;
    Ok(Decomposition {
        c: d.c.to_string(),
        distinct_roots: g.distinct_root_count(),
        distinct_roots_of_h: d.h.distinct_root_count(),
        f: d.f.to_json(),
        h: d.h.to_json(),
    })
}

pub fn picard_mori_view(x: &UmemuraFibration) -> PicardMoriView {
    let pm = picard_mori(x);
    PicardMoriView {
        intersection_matrix: pm.intersection_matrix,
        canonical_class: pm.canonical_class,
        k_dot_e: pm.k_pairings[0],
        k_dot_sigma: pm.k_pairings[1],
        k_dot_e_adjunction: pm.k_dot_e_adjunction,
        consistent: pm.is_consistent(),
    }
}

pub fn aut_profile_view(x: &UmemuraFibration) -> AutProfileView {
    let p = automorphism_profile(x);
    let (horizontal, weights, coordinate_change) = match &p.horizontal {
        HorizontalPart::Trivial => ("Trivial", None, None),
        HorizontalPart::FullPgl2 => ("FullPgl2", None, None),
        HorizontalPart::OneParameter {
            a0,
            a1,
            xn_weight,
            coordinate_change,
        } => (
            "OneParameter",
            Some([*a0 as i64, *a1 as i64, *xn_weight]),
            Some(coordinate_change.entries().map(|e| e.to_string())),
        ),
    };
    AutProfileView {
        vertical_group: p.vertical_group,
        vertical_dimension: p.vertical_dimension,
        horizontal: horizontal.to_string(),
        weights,
        coordinate_change,
        ambient_vertical_dimension: p.ambient_vertical_dimension,
    }
}

pub fn orbit_census_view(x: &UmemuraFibration) -> OrbitCensusView {
    let c = orbit_census(x);
    OrbitCensusView {
        strata: c
            .strata
            .iter()
            .map(|s| {
                let (fiber, multiplicity) = match &s.fiber {
                    FiberClass::NonRoot => ("generic".to_string(), None),
                    FiberClass::Root(p, k) => (p.key(), Some(*k)),
                };
                OrbitView {
                    fiber,
                    multiplicity,
                    label: s.label.name().to_string(),
                    dimension: s.dimension,
                }
            })
            .collect(),
        full_description: c.full_description,
    }
}

pub fn link_report(x: &UmemuraFibration, cap: u32) -> Result<LinkReport> {
    let enumeration = enumerate_links(x, cap)?;
    let certificates = enumeration
        .links
        .iter()
        .map(|l| match l.kind {
            crate::birgeom::LinkKind::ProductNoLinks => Ok(None),
            _ => validate_link(l).map(Some),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkReport {
        enumeration,
        certificates,
    })
}

fn push(
    out: &mut Vec<Discrepancy>,
    reference: String,
    printed: impl ToString,
    computed: impl ToString,
) {
    let (printed_value, computed_value) = (printed.to_string(), computed.to_string());
    if printed_value != computed_value {
        out.push(Discrepancy {
            reference,
            printed_value,
            computed_value,
        });
    }
}

fn class_string(c: [i64; 2]) -> String {
    format!("{}H + {}F", c[0], c[1])
}

/// Reference values that disagree with the computation: the canonical class
/// and `K.e` always, and per ledger the final-step data.
pub fn printed_discrepancies(
    x: &UmemuraFibration,
    ledgers: &[ResolutionLedger],
) -> Vec<Discrepancy> {
    let (n, a) = (x.n() as i64, x.a() as i64);
    let pm = picard_mori(x);
    let mut out = Vec::new();
    push(
        &mut out,
        "canonical class K = -(n-2)H + (a-2)F".into(),
        class_string([-(n - 2), a - 2]),
        class_string(pm.canonical_class),
    );
    push(&mut out, "K.e = n-1".into(), n - 1, pm.k_pairings[0]);
    push(&mut out, "K.sigma = a-2".into(), a - 2, pm.k_pairings[1]);
    for l in ledgers {
        let at = l.point.clone().unwrap_or_default();
        let last = l.steps.last().expect("nonempty ledger");
        let p = &l.printed;
        push(
            &mut out,
            format!("{at}: type of E_m by parity of m"),
            format!("{:?}", p.final_type_by_m_parity),
            format!("{:?}", last.exceptional_type),
        );
        push(
            &mut out,
            format!("{at}: fiber multiplicity of E_m"),
            p.printed_final_fiber_multiplicity,
            last.fiber_multiplicity,
        );
        push(
            &mut out,
            format!("{at}: discrepancy of E_m"),
            p.printed_final_discrepancy,
            last.discrepancy,
        );
        push(
            &mut out,
            format!("{at}: K.e_0"),
            p.printed_k_dot_e0,
            l.k_pairing(0),
        );
        for i in 1..l.m {
            push(
                &mut out,
                format!("{at}: K.e_{i}"),
                p.printed_k_dot_inner,
                l.k_pairing(i),
            );
        }
    }
    out
}

pub fn analyze(n: usize, g: &BinaryForm, cap: u32) -> Result<Report> {
    let x = build_fibration(n, g, cap)?;
    let ledgers = resolve_fibration(&x)?;
    Ok(Report {
        input: echo(&x),
        decomposition: decomposition(g)?,
        singular_locus: x
            .singular_points()
            .iter()
            .map(|s| SingularPointView {
                point: s.point.key(),
                multiplicity: s.multiplicity,
                gamma: s.gamma.coeffs().iter().map(|c| c.to_string()).collect(),
                gamma_exact: s.gamma_exact,
            })
            .collect(),
        picard_mori: picard_mori_view(&x),
        aut_profile: aut_profile_view(&x),
        orbit_census: orbit_census_view(&x),
        links: link_report(&x, cap)?,
        maximality: decide_maximality(&x, cap)?,
        printed_discrepancies: printed_discrepancies(&x, &ledgers),
        resolution_ledgers: ledgers,
    })
}

pub fn resolve_report(n: usize, g: &BinaryForm, b_max: u32, cap: u32) -> Result<ResolveReport> {
    let x = build_fibration(n, g, cap)?;
    let points: Vec<PointP1> = x
        .singular_points()
        .iter()
        .map(|s| s.point.clone())
        .collect();
    Ok(ResolveReport {
        input: echo(&x),
        resolution_ledgers: resolve_fibration(&x)?,
        extractions: points
            .iter()
            .map(|p| classify_extractions(&x, p, b_max))
            .collect::<Result<_>>()?,
    })
}

pub fn census_report(n: usize, g: &BinaryForm, cap: u32) -> Result<CensusReport> {
    let x = build_fibration(n, g, cap)?;
    Ok(CensusReport {
        input: echo(&x),
        aut_profile: aut_profile_view(&x),
        orbit_census: orbit_census_view(&x),
    })
}
