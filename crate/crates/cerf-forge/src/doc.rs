//! Versioned JSON documents for every top-level object, with strict parsing
//! and canonical serialization. Unknown fields are rejected, heights travel
//! as exact "n" or "n/d" strings, and serialization always emits sorted keys
//! so identical objects produce identical bytes.

use crate::family_one::{
    CerfGraphic1, ElementaryInterval, Event1, SurgeryData, SwitchLocale,
};
use crate::family_two::{ElementaryPolygon, Event2, PolygonDecomposition};
use crate::invariants::TrisectionDiagram;
use crate::morse::{Height, MorseEvent, SlicedMorseFunction, TimedEvent};
use crate::ribbon::{RibbonNeighborhood, Side};
use crate::surface::{CutSystem, HomologyClass, SlideMove};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

pub const FORMAT_VERSION: &str = "1.0.0";

/// Any object the toolkit reads or writes as a standalone file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Surface { genus: usize, system: CutSystem },
    Morse(SlicedMorseFunction),
    Graphic1 { graphic: CerfGraphic1, start_system: CutSystem },
    Trisection(TrisectionDiagram),
    Decomposition(PolygonDecomposition),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Surface { .. } => "surface",
            Document::Morse(_) => "morse",
            Document::Graphic1 { .. } => "graphic1",
            Document::Trisection(_) => "trisection",
            Document::Decomposition(_) => "decomposition",
        }
    }
}

fn doc_err(code: &str, message: impl Into<String>) -> Error {
    Error::Document { code: code.to_string(), message: message.into() }
}

/// Accepts 1.0.x for any integer patch level.
fn version_ok(v: &str) -> bool {
    let mut parts = v.split('.');
    let (major, minor, patch) = (parts.next(), parts.next(), parts.next());
    if parts.next().is_some() {
        return false;
    }
    matches!(
        (major, minor, patch),
        (Some("1"), Some("0"), Some(p)) if p.parse::<u64>().is_ok()
    )
}

// ---------------------------------------------------------------------------
// Wire shapes. Every struct rejects unknown fields; enum-like payloads use an
// explicit `kind` string plus optional fields so shape errors stay readable.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeDto {
    format_version: String,
    kind: String,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfacePayload {
    genus: usize,
    curves: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorsePayload {
    events: Vec<EventDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDto {
    height: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    circle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inputs: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RibbonDto {
    vertices: usize,
    partner: Vec<usize>,
    corners: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurgeryDto {
    replaced: Vec<i64>,
    new: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocaleDto {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    neighborhood: Option<RibbonDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surgery: Option<SurgeryDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Event1Dto {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    second: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locale: Option<LocaleDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlideDto {
    target: usize,
    other: usize,
    sign: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentDto {
    start: usize,
    end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    event: Option<Event1Dto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slide: Option<SlideDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Graphic1Payload {
    genus: usize,
    cyclic: bool,
    functions: Vec<MorsePayload>,
    start_system: Vec<Vec<i64>>,
    segments: Vec<SegmentDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrisectionPayload {
    g: usize,
    k: usize,
    alpha: Vec<Vec<i64>>,
    beta: Vec<Vec<i64>>,
    gamma: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CenterDto {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    neighborhood: Option<RibbonDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_classes: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonDto {
    boundary: Vec<SegmentDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<CenterDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionPayload {
    genus: usize,
    functions: Vec<MorsePayload>,
    polygons: Vec<PolygonDto>,
    gluings: Vec<[[usize; 2]; 2]>,
    start_system: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary_trisection: Option<TrisectionPayload>,
}

// ---------------------------------------------------------------------------
// Wire -> domain.

fn rows_to_system(genus: usize, rows: &[Vec<i64>], what: &str) -> Result<CutSystem> {
    for row in rows {
        if row.len() != 2 * genus {
            return Err(doc_err(
                "DIMENSION_MISMATCH",
                format!("{}: curve has {} coordinates, expected {}", what, row.len(), 2 * genus),
            ));
        }
    }
    Ok(CutSystem::from_rows(genus, rows))
}

fn class_from_row(genus: usize, row: &[i64], what: &str) -> Result<HomologyClass> {
    if row.len() != 2 * genus {
        return Err(doc_err(
            "DIMENSION_MISMATCH",
            format!("{}: class has {} coordinates, expected {}", what, row.len(), 2 * genus),
        ));
    }
    Ok(HomologyClass(row.to_vec()))
}

fn morse_from_payload(p: &MorsePayload) -> Result<SlicedMorseFunction> {
    let mut events = Vec::with_capacity(p.events.len());
    for (i, e) in p.events.iter().enumerate() {
        let height = Height::from_str(&e.height)
            .map_err(|err| doc_err("MALFORMED_PAYLOAD", format!("event {}: {}", i, err)))?;
        let bad = |what: &str| {
            doc_err("MALFORMED_PAYLOAD", format!("event {} ({}): {}", i, e.kind, what))
        };
        let event = match e.kind.as_str() {
            "birth" | "death" => {
                if e.input.is_some() || e.inputs.is_some() || e.output.is_some() || e.outputs.is_some() {
                    return Err(bad("extrema carry only a circle id"));
                }
                let circle = e.circle.clone().ok_or_else(|| bad("missing circle"))?;
                if e.kind == "birth" {
                    MorseEvent::Birth { circle }
                } else {
                    MorseEvent::Death { circle }
                }
            }
            "merge" => {
                if e.circle.is_some() || e.input.is_some() || e.outputs.is_some() {
                    return Err(bad("a merge carries inputs and output"));
                }
                let inputs = e.inputs.clone().ok_or_else(|| bad("missing inputs"))?;
                let output = e.output.clone().ok_or_else(|| bad("missing output"))?;
                MorseEvent::Merge { inputs, output }
            }
            "split" => {
                if e.circle.is_some() || e.inputs.is_some() || e.output.is_some() {
                    return Err(bad("a split carries input and outputs"));
                }
                let input = e.input.clone().ok_or_else(|| bad("missing input"))?;
                let outputs = e.outputs.clone().ok_or_else(|| bad("missing outputs"))?;
                MorseEvent::Split { input, outputs }
            }
            other => {
                return Err(doc_err(
                    "MALFORMED_PAYLOAD",
                    format!("event {}: unknown event kind {:?}", i, other),
                ));
            }
        };
        events.push(TimedEvent { height, event });
    }
    let f = SlicedMorseFunction::new(events);
    let report = f.validate().report;
    if !report.valid() {
        let first = &report.failures[0];
        let code = if first.code == "CIRCLE_NOT_LIVE" { "DANGLING_CIRCLE_ID" } else { &first.code };
        return Err(doc_err(code, report.summary()));
    }
    Ok(f)
}

fn ribbon_from_dto(d: &RibbonDto) -> Result<RibbonNeighborhood> {
    let mut sides = Vec::with_capacity(d.corners.len());
    for (i, c) in d.corners.chars().enumerate() {
        let side = Side::from_char(c).ok_or_else(|| {
            doc_err("MALFORMED_PAYLOAD", format!("corner {} is {:?}, expected '+' or '-'", i, c))
        })?;
        sides.push(side);
    }
    RibbonNeighborhood::new(d.vertices, d.partner.clone(), sides)
}

fn event1_from_dto(genus: usize, d: &Event1Dto) -> Result<Event1> {
    let bad = |what: &str| doc_err("MALFORMED_PAYLOAD", format!("event ({}): {}", d.kind, what));
    match d.kind.as_str() {
        "birth" | "death" => {
            if d.first.is_some() || d.second.is_some() || d.locale.is_some() {
                return Err(bad("extremum events carry only a slot"));
            }
            let slot = d.slot.ok_or_else(|| bad("missing slot"))?;
            Ok(if d.kind == "birth" { Event1::Birth { slot } } else { Event1::Death { slot } })
        }
        "switch" => {
            if d.slot.is_some() {
                return Err(bad("a switch carries first/second, not a slot"));
            }
            let first = d.first.ok_or_else(|| bad("missing first"))?;
            let second = d.second.ok_or_else(|| bad("missing second"))?;
            let locale_dto = d.locale.as_ref().ok_or_else(|| bad("missing locale"))?;
            let locale = match locale_dto.kind.as_str() {
                "different_components" => {
                    if locale_dto.neighborhood.is_some() || locale_dto.surgery.is_some() {
                        return Err(bad("a different-components locale carries no data"));
                    }
                    SwitchLocale::DifferentComponents
                }
                "same_component" => {
                    let nd = locale_dto
                        .neighborhood
                        .as_ref()
                        .ok_or_else(|| bad("missing neighborhood"))?;
                    let neighborhood = ribbon_from_dto(nd)?;
                    let surgery = match &locale_dto.surgery {
                        None => None,
                        Some(s) => Some(SurgeryData {
                            replaced: class_from_row(genus, &s.replaced, "surgery replaced")?,
                            new_class: class_from_row(genus, &s.new, "surgery new")?,
                        }),
                    };
                    SwitchLocale::SameComponent { neighborhood, surgery }
                }
                other => return Err(bad(&format!("unknown locale kind {:?}", other))),
            };
            Ok(Event1::Switch { first, second, locale })
        }
        other => Err(doc_err("MALFORMED_PAYLOAD", format!("unknown event kind {:?}", other))),
    }
}

fn slide_from_dto(d: &SlideDto) -> SlideMove {
    SlideMove { target: d.target, other: d.other, sign: d.sign }
}

fn segment_from_dto(
    genus: usize,
    functions: &[SlicedMorseFunction],
    d: &SegmentDto,
    where_: &str,
) -> Result<ElementaryInterval> {
    for idx in [d.start, d.end] {
        if idx >= functions.len() {
            return Err(doc_err(
                "DANGLING_FUNCTION_REF",
                format!("{}: function {} of {} does not exist", where_, idx, functions.len()),
            ));
        }
    }
    Ok(ElementaryInterval {
        start: functions[d.start].clone(),
        end: functions[d.end].clone(),
        event: d.event.as_ref().map(|e| event1_from_dto(genus, e)).transpose()?,
        slide: d.slide.as_ref().map(slide_from_dto),
    })
}

fn graphic1_from_payload(p: &Graphic1Payload) -> Result<(CerfGraphic1, CutSystem)> {
    let mut functions = Vec::with_capacity(p.functions.len());
    for (i, fp) in p.functions.iter().enumerate() {
        let f = morse_from_payload(fp).map_err(|e| match e {
            Error::Document { code, message } => {
                Error::Document { code, message: format!("function {}: {}", i, message) }
            }
            other => other,
        })?;
        functions.push(f);
    }
    let mut segments = Vec::with_capacity(p.segments.len());
    for (i, sd) in p.segments.iter().enumerate() {
        segments.push(segment_from_dto(p.genus, &functions, sd, &format!("segment {}", i))?);
    }
    let start_system = rows_to_system(p.genus, &p.start_system, "start system")?;
    Ok((CerfGraphic1 { genus: p.genus, cyclic: p.cyclic, segments }, start_system))
}

fn trisection_from_payload(p: &TrisectionPayload) -> Result<TrisectionDiagram> {
    Ok(TrisectionDiagram {
        genus: p.g,
        k: p.k,
        alpha: rows_to_system(p.g, &p.alpha, "alpha")?,
        beta: rows_to_system(p.g, &p.beta, "beta")?,
        gamma: rows_to_system(p.g, &p.gamma, "gamma")?,
    })
}

fn center_from_dto(d: &CenterDto) -> Result<Event2> {
    let bad = |what: &str| doc_err("MALFORMED_PAYLOAD", format!("center ({}): {}", d.kind, what));
    match d.kind.as_str() {
        "swallowtail" | "birth_morse_cross" => {
            if d.neighborhood.is_some() || d.local_classes.is_some() {
                return Err(bad("this center kind carries no extra data"));
            }
            Ok(if d.kind == "swallowtail" { Event2::Swallowtail } else { Event2::BirthMorseCross })
        }
        "triple_switch" => {
            let nd = d.neighborhood.as_ref().ok_or_else(|| bad("missing neighborhood"))?;
            let neighborhood = ribbon_from_dto(nd)?;
            let local_classes = match &d.local_classes {
                None => None,
                Some(rows) => {
                    if rows.len() != 3 {
                        return Err(bad("exactly three local classes expected"));
                    }
                    let mut classes = Vec::with_capacity(3);
                    for row in rows {
                        classes.push(class_from_row(1, row, "local class")?);
                    }
                    Some([classes[0].clone(), classes[1].clone(), classes[2].clone()])
                }
            };
            Ok(Event2::TripleSwitch { neighborhood, local_classes })
        }
        other => Err(doc_err("MALFORMED_PAYLOAD", format!("unknown center kind {:?}", other))),
    }
}

fn decomposition_from_payload(p: &DecompositionPayload) -> Result<PolygonDecomposition> {
    let mut functions = Vec::with_capacity(p.functions.len());
    for (i, fp) in p.functions.iter().enumerate() {
        let f = morse_from_payload(fp).map_err(|e| match e {
            Error::Document { code, message } => {
                Error::Document { code, message: format!("function {}: {}", i, message) }
            }
            other => other,
        })?;
        functions.push(f);
    }
    let mut polygons = Vec::with_capacity(p.polygons.len());
    for (pi, pd) in p.polygons.iter().enumerate() {
        let mut boundary = Vec::with_capacity(pd.boundary.len());
        for (ei, sd) in pd.boundary.iter().enumerate() {
            boundary.push(segment_from_dto(
                p.genus,
                &functions,
                sd,
                &format!("polygon {} edge {}", pi, ei),
            )?);
        }
        let center = pd.center.as_ref().map(center_from_dto).transpose()?;
        polygons.push(ElementaryPolygon { boundary, center });
    }
    for (gi, [[pa, ea], [pb, eb]]) in p.gluings.iter().enumerate() {
        for (pp, ee) in [(pa, ea), (pb, eb)] {
            if *pp >= polygons.len() || *ee >= polygons[*pp].boundary.len() {
                return Err(doc_err(
                    "DANGLING_EDGE_REF",
                    format!("gluing {}: edge ({}, {}) does not exist", gi, pp, ee),
                ));
            }
        }
    }
    let start_system = rows_to_system(p.genus, &p.start_system, "start system")?;
    let boundary_trisection = p.boundary_trisection.as_ref().map(trisection_from_payload).transpose()?;
    Ok(PolygonDecomposition {
        genus: p.genus,
        polygons,
        gluings: p.gluings.iter().map(|[[a, b], [c, d]]| ((*a, *b), (*c, *d))).collect(),
        start_system,
        boundary_trisection,
    })
}

/// Strict parse of a document envelope. Every failure carries a stable code:
/// MALFORMED_JSON, UNKNOWN_VERSION, UNKNOWN_KIND, MALFORMED_PAYLOAD,
/// DANGLING_CIRCLE_ID, DANGLING_FUNCTION_REF, DANGLING_EDGE_REF, the
/// function-level codes (DUPLICATE_HEIGHT, ...), or the neighborhood-level
/// RIBBON_* codes.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| doc_err("MALFORMED_JSON", format!("not valid JSON: {}", e)))?;
    let env: EnvelopeDto = serde_json::from_value(value)
        .map_err(|e| doc_err("MALFORMED_PAYLOAD", format!("envelope: {}", e)))?;
    if !version_ok(&env.format_version) {
        return Err(doc_err(
            "UNKNOWN_VERSION",
            format!("format version {:?} is not supported (expected 1.0.x)", env.format_version),
        ));
    }
    fn payload<T: serde::de::DeserializeOwned>(env: EnvelopeDto) -> Result<T> {
        serde_json::from_value(env.payload)
            .map_err(|e| doc_err("MALFORMED_PAYLOAD", format!("{} payload: {}", env.kind, e)))
    }
    match env.kind.as_str() {
        "surface" => {
            let p: SurfacePayload = payload(env)?;
            let system = rows_to_system(p.genus, &p.curves, "curves")?;
            Ok(Document::Surface { genus: p.genus, system })
        }
        "morse" => {
            let p: MorsePayload = payload(env)?;
            Ok(Document::Morse(morse_from_payload(&p)?))
        }
        "graphic1" => {
            let p: Graphic1Payload = payload(env)?;
            let (graphic, start_system) = graphic1_from_payload(&p)?;
            Ok(Document::Graphic1 { graphic, start_system })
        }
        "trisection" => {
            let p: TrisectionPayload = payload(env)?;
            Ok(Document::Trisection(trisection_from_payload(&p)?))
        }
        "decomposition" => {
            let p: DecompositionPayload = payload(env)?;
            Ok(Document::Decomposition(decomposition_from_payload(&p)?))
        }
        other => Err(doc_err("UNKNOWN_KIND", format!("unknown document kind {:?}", other))),
    }
}

// ---------------------------------------------------------------------------
// Domain -> wire.

fn morse_to_payload(f: &SlicedMorseFunction) -> MorsePayload {
    let events = f
        .events
        .iter()
        .map(|t| {
            let height = t.height.to_string();
            match &t.event {
                MorseEvent::Birth { circle } => EventDto {
                    height,
                    kind: "birth".into(),
                    circle: Some(circle.clone()),
                    input: None,
                    inputs: None,
                    output: None,
                    outputs: None,
                },
                MorseEvent::Death { circle } => EventDto {
                    height,
                    kind: "death".into(),
                    circle: Some(circle.clone()),
                    input: None,
                    inputs: None,
                    output: None,
                    outputs: None,
                },
                MorseEvent::Merge { inputs, output } => EventDto {
                    height,
                    kind: "merge".into(),
                    circle: None,
                    input: None,
                    inputs: Some(inputs.clone()),
                    output: Some(output.clone()),
                    outputs: None,
                },
                MorseEvent::Split { input, outputs } => EventDto {
                    height,
                    kind: "split".into(),
                    circle: None,
                    input: Some(input.clone()),
                    inputs: None,
                    output: None,
                    outputs: Some(outputs.clone()),
                },
            }
        })
        .collect();
    MorsePayload { events }
}

fn rows_of(system: &CutSystem) -> Vec<Vec<i64>> {
    system.curves.iter().map(|c| c.0.clone()).collect()
}

fn ribbon_to_dto(rn: &RibbonNeighborhood) -> RibbonDto {
    RibbonDto {
        vertices: rn.vertices(),
        partner: rn.partner().to_vec(),
        corners: rn.corner_string(),
    }
}

fn event1_to_dto(e: &Event1) -> Event1Dto {
    match e {
        Event1::Birth { slot } => Event1Dto {
            kind: "birth".into(),
            slot: Some(*slot),
            first: None,
            second: None,
            locale: None,
        },
        Event1::Death { slot } => Event1Dto {
            kind: "death".into(),
            slot: Some(*slot),
            first: None,
            second: None,
            locale: None,
        },
        Event1::Switch { first, second, locale } => Event1Dto {
            kind: "switch".into(),
            slot: None,
            first: Some(*first),
            second: Some(*second),
            locale: Some(match locale {
                SwitchLocale::DifferentComponents => LocaleDto {
                    kind: "different_components".into(),
                    neighborhood: None,
                    surgery: None,
                },
                SwitchLocale::SameComponent { neighborhood, surgery } => LocaleDto {
                    kind: "same_component".into(),
                    neighborhood: Some(ribbon_to_dto(neighborhood)),
                    surgery: surgery.as_ref().map(|s| SurgeryDto {
                        replaced: s.replaced.0.clone(),
                        new: s.new_class.0.clone(),
                    }),
                },
            }),
        },
    }
}

/// Interns each distinct function once and returns segment DTOs indexing
/// into the table.
fn intern_segments(
    functions: &mut Vec<SlicedMorseFunction>,
    segments: &[ElementaryInterval],
) -> Vec<SegmentDto> {
    let index_of = |functions: &mut Vec<SlicedMorseFunction>, f: &SlicedMorseFunction| {
        match functions.iter().position(|g| g == f) {
            Some(i) => i,
            None => {
                functions.push(f.clone());
                functions.len() - 1
            }
        }
    };
    segments
        .iter()
        .map(|seg| SegmentDto {
            start: index_of(functions, &seg.start),
            end: index_of(functions, &seg.end),
            event: seg.event.as_ref().map(event1_to_dto),
            slide: seg.slide.map(|s| SlideDto { target: s.target, other: s.other, sign: s.sign }),
        })
        .collect()
}

fn trisection_to_payload(t: &TrisectionDiagram) -> TrisectionPayload {
    TrisectionPayload {
        g: t.genus,
        k: t.k,
        alpha: rows_of(&t.alpha),
        beta: rows_of(&t.beta),
        gamma: rows_of(&t.gamma),
    }
}

fn center_to_dto(c: &Event2) -> CenterDto {
    match c {
        Event2::Swallowtail => CenterDto {
            kind: "swallowtail".into(),
            neighborhood: None,
            local_classes: None,
        },
        Event2::BirthMorseCross => CenterDto {
            kind: "birth_morse_cross".into(),
            neighborhood: None,
            local_classes: None,
        },
        Event2::TripleSwitch { neighborhood, local_classes } => CenterDto {
            kind: "triple_switch".into(),
            neighborhood: Some(ribbon_to_dto(neighborhood)),
            local_classes: local_classes
                .as_ref()
                .map(|cs| cs.iter().map(|c| c.0.clone()).collect()),
        },
    }
}

fn envelope(kind: &str, payload: serde_json::Value) -> EnvelopeDto {
    EnvelopeDto { format_version: FORMAT_VERSION.to_string(), kind: kind.to_string(), payload }
}

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

pub fn serialize_document(doc: &Document) -> String {
    let env = match doc {
        Document::Surface { genus, system } => envelope(
            "surface",
            serde_json::to_value(SurfacePayload { genus: *genus, curves: rows_of(system) })
                .expect("payload"),
        ),
        Document::Morse(f) => {
            envelope("morse", serde_json::to_value(morse_to_payload(f)).expect("payload"))
        }
        Document::Graphic1 { graphic, start_system } => {
            let mut functions = Vec::new();
            let segments = intern_segments(&mut functions, &graphic.segments);
            let payload = Graphic1Payload {
                genus: graphic.genus,
                cyclic: graphic.cyclic,
                functions: functions.iter().map(morse_to_payload).collect(),
                start_system: rows_of(start_system),
                segments,
            };
            envelope("graphic1", serde_json::to_value(payload).expect("payload"))
        }
        Document::Trisection(t) => envelope(
            "trisection",
            serde_json::to_value(trisection_to_payload(t)).expect("payload"),
        ),
        Document::Decomposition(dec) => {
            let mut functions = Vec::new();
            let polygons: Vec<PolygonDto> = dec
                .polygons
                .iter()
                .map(|poly| PolygonDto {
                    boundary: intern_segments(&mut functions, &poly.boundary),
                    center: poly.center.as_ref().map(center_to_dto),
                })
                .collect();
            let payload = DecompositionPayload {
                genus: dec.genus,
                functions: functions.iter().map(morse_to_payload).collect(),
                polygons,
                gluings: dec
                    .gluings
                    .iter()
                    .map(|((a, b), (c, d))| [[*a, *b], [*c, *d]])
                    .collect(),
                start_system: rows_of(&dec.start_system),
                boundary_trisection: dec.boundary_trisection.as_ref().map(trisection_to_payload),
            };
            envelope("decomposition", serde_json::to_value(payload).expect("payload"))
        }
    };
    to_canonical_json(&env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_doc() -> String {
        r#"{
          "format_version": "1.0.0",
          "kind": "morse",
          "payload": {
            "events": [
              {"height": "0", "kind": "birth", "circle": "c"},
              {"height": "1", "kind": "death", "circle": "c"}
            ]
          }
        }"#
        .to_string()
    }

    #[test]
    fn sphere_document_parses_to_two_events() {
        let doc = parse_document(&sphere_doc()).unwrap();
        match doc {
            Document::Morse(f) => assert_eq!(f.events.len(), 2),
            other => panic!("expected a morse document, got {}", other.kind()),
        }
    }

    #[test]
    fn parse_rejects_with_stable_codes() {
        let cases: Vec<(String, &str)> = vec![
            ("not json at all".into(), "MALFORMED_JSON"),
            (
                r#"{"format_version": "2.0.0", "kind": "morse", "payload": {"events": []}}"#.into(),
                "UNKNOWN_VERSION",
            ),
            (
                r#"{"format_version": "1.0.0", "kind": "mystery", "payload": {}}"#.into(),
                "UNKNOWN_KIND",
            ),
            (
                r#"{"format_version": "1.0.0", "kind": "morse", "payload": {"events": [], "extra": 1}}"#.into(),
                "MALFORMED_PAYLOAD",
            ),
            (
                sphere_doc().replace("\"1\"", "\"3/2\"").replace("\"0\"", "\"3/2\""),
                "DUPLICATE_HEIGHT",
            ),
            (
                sphere_doc().replace(
                    "\"kind\": \"death\", \"circle\": \"c\"",
                    "\"kind\": \"death\", \"circle\": \"ghost\"",
                ),
                "DANGLING_CIRCLE_ID",
            ),
        ];
        for (text, code) in cases {
            let err = parse_document(&text).unwrap_err();
            assert_eq!(err.code(), code, "expected {} from {:?}", code, text);
        }
    }

    #[test]
    fn trisection_document_round_trips() {
        let text = r#"{
          "format_version": "1.0.0",
          "kind": "trisection",
          "payload": {
            "g": 1, "k": 0,
            "alpha": [[1, 0]],
            "beta": [[0, 1]],
            "gamma": [[1, 1]]
          }
        }"#;
        let doc = parse_document(text).unwrap();
        let once = serialize_document(&doc);
        let doc2 = parse_document(&once).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(once, serialize_document(&doc2));
    }

    #[test]
    fn graphic_documents_intern_functions_and_round_trip() {
        use crate::invariants::TrisectionDiagram;
        let t = TrisectionDiagram {
            genus: 1,
            k: 0,
            alpha: CutSystem::from_rows(1, &[vec![1, 0]]),
            beta: CutSystem::from_rows(1, &[vec![0, 1]]),
            gamma: CutSystem::from_rows(1, &[vec![1, 1]]),
        };
        let fam = crate::family_one::standard_family_from_trisection(&t).unwrap();
        let doc = Document::Graphic1 {
            graphic: fam.graphic.clone(),
            start_system: t.alpha.clone(),
        };
        let text = serialize_document(&doc);
        // All three switch segments share one standard function.
        let env: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(env["payload"]["functions"].as_array().unwrap().len(), 1);
        let doc2 = parse_document(&text).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(text, serialize_document(&doc2));
    }

    #[test]
    fn dangling_references_are_reported() {
        let graphic = r#"{
          "format_version": "1.0.0",
          "kind": "graphic1",
          "payload": {
            "genus": 1,
            "cyclic": false,
            "functions": [],
            "start_system": [[1, 0]],
            "segments": [{"start": 0, "end": 0}]
          }
        }"#;
        assert_eq!(parse_document(graphic).unwrap_err().code(), "DANGLING_FUNCTION_REF");

        let dec = r#"{
          "format_version": "1.0.0",
          "kind": "decomposition",
          "payload": {
            "genus": 1,
            "functions": [],
            "polygons": [],
            "gluings": [[[0, 0], [0, 1]]],
            "start_system": [[1, 0]]
          }
        }"#;
        assert_eq!(parse_document(dec).unwrap_err().code(), "DANGLING_EDGE_REF");
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let text = r#"{
          "format_version": "1.0.0",
          "kind": "surface",
          "payload": {"genus": 2, "curves": [[1, 0]]}
        }"#;
        assert_eq!(parse_document(text).unwrap_err().code(), "DIMENSION_MISMATCH");
    }

    #[test]
    fn ribbon_codes_pass_through() {
        let text = r#"{
          "format_version": "1.0.0",
          "kind": "graphic1",
          "payload": {
            "genus": 1,
            "cyclic": false,
            "functions": [
              {"events": [
                {"height": "0", "kind": "birth", "circle": "c"},
                {"height": "1", "kind": "death", "circle": "c"}
              ]}
            ],
            "start_system": [[1, 0]],
            "segments": [{
              "start": 0, "end": 0,
              "event": {
                "kind": "switch", "first": 0, "second": 1,
                "locale": {
                  "kind": "same_component",
                  "neighborhood": {"vertices": 2, "partner": [0, 1, 2, 3, 4, 5, 6, 7], "corners": "+-+-+-+-"}
                }
              }
            }]
          }
        }"#;
        assert_eq!(parse_document(text).unwrap_err().code(), "RIBBON_BAD_MATCHING");
    }

    #[test]
    fn version_window_is_exactly_one_dot_zero() {
        assert!(version_ok("1.0.0"));
        assert!(version_ok("1.0.7"));
        assert!(!version_ok("1.1.0"));
        assert!(!version_ok("0.9.0"));
        assert!(!version_ok("1.0"));
        assert!(!version_ok("1.0.0.0"));
        assert!(!version_ok("1.0.x"));
    }

    #[test]
    fn surface_and_morse_round_trip() {
        let surface = Document::Surface {
            genus: 2,
            system: CutSystem::from_rows(2, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]),
        };
        let text = serialize_document(&surface);
        assert_eq!(parse_document(&text).unwrap(), surface);

        let f = SlicedMorseFunction::standard(2);
        let morse = Document::Morse(f);
        let text = serialize_document(&morse);
        assert_eq!(parse_document(&text).unwrap(), morse);
        // Heights survive as exact strings.
        assert!(text.contains("\"height\""));
    }
}
