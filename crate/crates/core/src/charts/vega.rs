use serde_json::{json, Map, Value};

use super::{Axis, ChartSpec, ColorEncoding, FieldKind, Mark, Scale};
use crate::decisions::SubscribedStatus;

/// The grammar version every emitted document targets.
pub const VEGA_LITE_SCHEMA: &str = "https://vega.github.io/schema/vega-lite/v6.4.1.json";

fn kind(k: FieldKind) -> &'static str {
    match k {
        FieldKind::Quantitative => "quantitative",
        FieldKind::Ordinal => "ordinal",
        FieldKind::Nominal => "nominal",
    }
}

fn tooltip_kind(field: &str) -> &'static str {
    match field {
        "title" | "status" | "subject" => "nominal",
        _ => "quantitative",
    }
}

fn channel(axis: &Axis) -> Value {
    let mut c = Map::new();
    match axis.field {
        Some(field) => {
            c.insert("field".into(), json!(field));
        }
        None => {
            c.insert("aggregate".into(), json!("count"));
        }
    }
    c.insert("type".into(), json!(kind(axis.kind)));
    c.insert("title".into(), json!(axis.title));
    if axis.scale == Scale::Log {
        c.insert("scale".into(), json!({ "type": "log" }));
    }
    Value::Object(c)
}

fn color(encoding: ColorEncoding) -> Option<Value> {
    match encoding {
        ColorEncoding::StatusPalette => {
            let domain: Vec<_> = SubscribedStatus::ALL.iter().map(|s| s.label()).collect();
            let range: Vec<_> = SubscribedStatus::ALL.iter().map(|s| s.color()).collect();
            Some(json!({
                "field": "status",
                "type": "nominal",
                "title": "Subscribed",
                "scale": { "domain": domain, "range": range },
            }))
        }
        ColorEncoding::CpuRankGradient => Some(json!({
            "field": "cpu_rank",
            "type": "quantitative",
            "title": "CPU rank",
            "scale": { "scheme": "viridis" },
        })),
        ColorEncoding::None => None,
    }
}

pub(super) fn to_vega_lite(spec: &ChartSpec) -> Value {
    let d = &spec.descriptor;
    let keep = spec.encoded_fields();
    let values: Vec<Value> = spec
        .data
        .iter()
        .map(|row| {
            Value::Object(
                row.iter()
                    .filter(|(k, _)| keep.contains(&k.as_str()))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect(),
            )
        })
        .collect();

    let mut encoding = Map::new();
    let mut x = channel(&d.x);
    if spec.x2.is_some() {
        x["bin"] = json!({ "binned": true });
    }
    encoding.insert("x".into(), x);
    if let Some(x2) = spec.x2 {
        encoding.insert("x2".into(), json!({ "field": x2 }));
    }
    let mut y = channel(&d.y);
    if d.mark == Mark::Rect {
        // Stack position 0 sits at the bottom of each column.
        y["sort"] = json!("descending");
    }
    encoding.insert("y".into(), y);
    if let Some(c) = color(d.color) {
        encoding.insert("color".into(), c);
    }
    if !spec.tooltip.is_empty() {
        let tooltip: Vec<Value> = spec
            .tooltip
            .iter()
            .map(|f| json!({ "field": f, "type": tooltip_kind(f) }))
            .collect();
        encoding.insert("tooltip".into(), Value::Array(tooltip));
    }

    let mark = match d.mark {
        Mark::Point => json!({ "type": "point", "filled": true }),
        Mark::Bar => json!({ "type": "bar" }),
        Mark::Rect => json!({ "type": "rect", "stroke": "white" }),
    };

    let mut doc = Map::new();
    doc.insert("$schema".into(), json!(VEGA_LITE_SCHEMA));
    doc.insert("title".into(), json!(d.title));
    doc.insert(
        "usermeta".into(),
        json!({
            "chart_id": d.id.as_str(),
            "number": d.number,
            "link_group": d.link_group,
            "excluded_non_positive": spec.excluded_non_positive,
            "excluded_undefined": spec.excluded_undefined,
        }),
    );
    doc.insert("width".into(), json!("container"));
    doc.insert("data".into(), json!({ "values": values }));
    doc.insert("mark".into(), mark);
    doc.insert("encoding".into(), Value::Object(encoding));
    if d.mark == Mark::Point && d.x.kind == FieldKind::Quantitative && d.y.kind == FieldKind::Quantitative {
        // Pan and zoom; charts in one link group share the parameter name.
        let name = d.link_group.unwrap_or("zoom");
        doc.insert(
            "params".into(),
            json!([{ "name": name, "select": "interval", "bind": "scales" }]),
        );
    }
    Value::Object(doc)
}
