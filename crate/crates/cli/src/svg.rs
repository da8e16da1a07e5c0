//! Emit-only SVG line plots: one polyline per signal, axes, min/max labels.

use crusoe_core::Trajectory;

use crate::fmt::fmt_f64;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn render_trajectory(traj: &Trajectory, title: &str) -> String {
    let times = traj.times();
    let t_min = times[0];
    let t_max = times[times.len() - 1];
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for good in traj.goods() {
        for v in traj.signal(good).expect("listed good") {
            v_min = v_min.min(*v);
            v_max = v_max.max(*v);
        }
    }
    if v_min == v_max {
        v_min -= 1.0;
        v_max += 1.0;
    }
    let x = |t: f64| MARGIN + (t - t_min) / (t_max - t_min) * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v - v_min) / (v_max - v_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    ));
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    ));
    // axis labels
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t</text>\n",
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0
    ));
    for (t, anchor) in [(t_min, "start"), (t_max, "end")] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>\n",
            x(t),
            HEIGHT - MARGIN + 16.0,
            fmt_f64(t)
        ));
    }
    for v in [v_min, v_max] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            MARGIN - 6.0,
            y(v) + 4.0,
            fmt_f64(v)
        ));
    }
    // at most ~1024 points per polyline keeps files small
    let stride = (times.len() / 1024).max(1);
    for (idx, good) in traj.goods().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let series = traj.signal(good).expect("listed good");
        let mut points = String::new();
        for i in (0..times.len()).step_by(stride).chain([times.len() - 1]) {
            points.push_str(&format!("{:.2},{:.2} ", x(times[i]), y(series[i])));
        }
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{}\"/>\n",
            points.trim_end()
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" fill=\"{color}\">Q_{good}</text>\n",
            WIDTH - MARGIN + 8.0,
            MARGIN + 16.0 * idx as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crusoe_core::GoodId;
    use std::collections::BTreeMap;

    #[test]
    fn renders_polylines_for_each_signal() {
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let mut signals = BTreeMap::new();
        signals.insert(
            GoodId::b(),
            times.iter().map(|t| 25.0 * (1.0 - (-t).exp())).collect(),
        );
        signals.insert(
            GoodId::c(),
            times.iter().map(|t| 12.5 * (1.0 - (-t).exp())).collect(),
        );
        let traj = Trajectory::new(times, signals).unwrap();
        let svg = render_trajectory(&traj, "canonical");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Q_B"));
        assert!(svg.contains("Q_C"));
    }
}
