//! The usage snippet from the top-level README, kept compiling.

use autoseq::{catalogue, strategy};

fn main() {
    let m = catalogue::fibonacci_word();
    let analysis = strategy::analyze(&m, &strategy::Config::default());
    println!("{:?}", analysis.verdict.conclusion);
    for item in &analysis.verdict.evidence {
        println!("[{:?}] {} ({})", item.grade, item.criterion, item.tag.as_str());
    }
}
