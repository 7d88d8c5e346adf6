use episodary::oracle::enumerate_episodes;
use episodary::{gen_planted, mine, MinerConfig, PlantedConfig};

fn main() {
    let t = std::time::Instant::now();
    println!("episodes(ab,3n,4e) = {}", enumerate_episodes(&["a", "b"], 3, 4).len());
    println!("episodes(abc,3n,3e) = {}", enumerate_episodes(&["a", "b", "c"], 3, 3).len());
    println!("episodes(abc,4n,4e) = {}", enumerate_episodes(&["a", "b", "c"], 4, 4).len());
    println!("enumeration took {:?}", t.elapsed());
    for n in [4u32, 5] {
        let t0 = std::time::Instant::now();
        let seq = gen_planted(&PlantedConfig {
            nodes: n, reps: 100, gap: 50, noise_count: 500, noise_alphabet: 900, seed: 42,
        }).unwrap();
        let out = mine(&seq, &MinerConfig::new(10, 100)).unwrap();
        println!("N={} closed={} elapsed={:?}", n, out.stats.closed, t0.elapsed());
    }
}
