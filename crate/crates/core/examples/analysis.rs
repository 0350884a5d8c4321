//! Summary statistics, paired and independent comparisons, and a
//! questionnaire table built from synthetic responses.

use evacsim::telemetry::{
    assign, describe, format_mean_sd, parse_responses, rank_sum, summarize_assessment,
    wilcoxon_signed_rank, Comparison, WilcoxonMode,
};

fn main() {
    let before = [2.0, 1.0, 3.0, 0.0, 2.0, 1.0, 2.0, 3.0];
    let after = [3.0, 3.0, 3.0, 2.0, 2.0, 3.0, 3.0, 2.0];
    let d = describe(&after).unwrap();
    println!(
        "after: n={} mean | sd = {}",
        d.n,
        format_mean_sd(d.mean, d.sd)
    );
    let w = wilcoxon_signed_rank(&after, &before, WilcoxonMode::Exact).unwrap();
    println!(
        "signed rank: n={} ({} zeros dropped) W+={} W-={} p={:.4}",
        w.n, w.zeros_dropped, w.w_plus, w.w_minus, w.p_value
    );
    let u = rank_sum(&after, &before).unwrap();
    println!("rank sum: p={:.4}", u.p_value.unwrap_or(f64::NAN));

    let groups = assign(20, Some(9), 11).unwrap();
    println!(
        "assigned {} to free roam, {} to training",
        groups.bp.len(),
        groups.tp.len()
    );

    let mut lines = String::new();
    for (proto, ids) in [("bp", &groups.bp), ("tp", &groups.tp)] {
        for (i, id) in ids.iter().enumerate() {
            for (k, comp) in [
                "env_realism",
                "quake_realism",
                "npc_realism",
                "navigability",
            ]
            .iter()
            .enumerate()
            {
                let score = ((i * 5 + k * 3) % 7) as i32 - 3 + i32::from(proto == "tp");
                let score = score.min(3);
                lines.push_str(&format!(
                    "{{\"participant\":\"{id}\",\"prototype\":\"{proto}\",\"component\":\"{comp}\",\"score\":{score}}}\n"
                ));
            }
        }
    }
    let responses = parse_responses(&lines).unwrap();
    let table = summarize_assessment(&responses, Comparison::RankSum).unwrap();
    print!("{}", table.render());
}
