//! Radar-graph SVG emitter for per-sentence emotion vectors.
//!
//! One axis per emotion in model order, starting at 12 o'clock and going
//! clockwise; the polygon's vertex radii are proportional to the aggregate
//! vector, scaled so the largest component reaches the full radius.

use crate::ranking::{Aggregate, EmotionVector, SentenceResult};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 780.0;
const CENTER_X: f64 = 360.0;
const CENTER_Y: f64 = 430.0;
const RADIUS: f64 = 270.0;

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// Clockwise position on axis `i` of `n` at `radius` from the center,
/// starting at 12 o'clock.
fn axis_point(i: usize, n: usize, radius: f64) -> (f64, f64) {
    let theta = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
    (CENTER_X + radius * theta.sin(), CENTER_Y - radius * theta.cos())
}

/// Full-precision polygon vertices for a vector, exactly as rendered:
/// the largest component reaches the full radius. None for an all-zero
/// vector (no polygon is drawn).
pub fn polygon_vertices(vector: &EmotionVector) -> Option<Vec<(f64, f64)>> {
    let values = vector.values();
    let n = values.len();
    let max_value = values.iter().copied().fold(0.0f64, f64::max);
    if max_value <= 0.0 {
        return None;
    }
    Some(
        values
            .iter()
            .enumerate()
            .map(|(i, v)| axis_point(i, n, RADIUS * v / max_value))
            .collect(),
    )
}

/// Distance of a rendered vertex from the radar center.
pub fn vertex_radius(point: (f64, f64)) -> f64 {
    ((point.0 - CENTER_X).powi(2) + (point.1 - CENTER_Y).powi(2)).sqrt()
}

/// The radius a maximal component maps to.
pub fn full_radius() -> f64 {
    RADIUS
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Render one sentence's aggregate emotion vector as an SVG radar graph.
///
/// The legend lists the content words kept by preprocessing, and the
/// sentence text is the chart title. A degenerate (all-zero) vector
/// renders the axes and a notice instead of a polygon.
pub fn emit_radar(result: &SentenceResult, how: Aggregate) -> String {
    render_radar(
        &result.sentence_id,
        &result.tokens.source,
        &result.tokens.tokens,
        result.vector(how),
        how,
    )
}

/// Radar rendering from parts, for replaying a prior run's outputs.
pub fn render_radar(
    sentence_id: &str,
    title: &str,
    terms: &[String],
    vector: &EmotionVector,
    how: Aggregate,
) -> String {
    let model = vector.model();
    let n = model.len();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!("  <title>{}</title>\n", escape_xml(title)));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"34\" text-anchor=\"middle\" font-size=\"18\" font-family=\"sans-serif\">{}</text>\n",
        CENTER_X,
        escape_xml(title)
    ));
    let legend = if terms.is_empty() {
        "(no content words)".to_string()
    } else {
        terms.join(", ")
    };
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"62\" text-anchor=\"middle\" font-size=\"13\" fill=\"#555\" font-family=\"sans-serif\">terms: {} | aggregate: {} | sentence {}</text>\n",
        CENTER_X,
        escape_xml(&legend),
        how.as_str(),
        escape_xml(sentence_id)
    ));

    // concentric grid rings at quarter steps
    for step in 1..=4 {
        let ring_radius = RADIUS * (step as f64) / 4.0;
        let points: Vec<String> = (0..n)
            .map(|i| {
                let (x, y) = axis_point(i, n, ring_radius);
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        svg.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"#ddd\" stroke-width=\"1\"/>\n",
            points.join(" ")
        ));
    }

    // axes and labels
    for (i, label) in model.labels.iter().enumerate() {
        let (x, y) = axis_point(i, n, RADIUS);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
            fmt(CENTER_X),
            fmt(CENTER_Y),
            fmt(x),
            fmt(y)
        ));
        let (lx, ly) = axis_point(i, n, RADIUS + 24.0);
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\" font-size=\"14\" font-family=\"sans-serif\">{}</text>\n",
            fmt(lx),
            fmt(ly),
            escape_xml(label)
        ));
    }

    if let Some(vertices) = polygon_vertices(vector) {
        let points: Vec<String> =
            vertices.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect();
        svg.push_str(&format!(
            "  <polygon class=\"emotion-load\" points=\"{}\" fill=\"#4477aa\" fill-opacity=\"0.35\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
        for (x, y) in &vertices {
            svg.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#4477aa\"/>\n",
                fmt(*x),
                fmt(*y)
            ));
        }
    } else {
        svg.push_str(&format!(
            "  <text class=\"notice\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"15\" fill=\"#aa3333\" font-family=\"sans-serif\">no co-occurrence evidence for this sentence</text>\n",
            fmt(CENTER_X),
            fmt(CENTER_Y)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
