//! Deterministic synthetic corpus generation for tests and fixtures.
//!
//! The generator plants delta winners, one-on-one exchanges, repeat
//! challengers, Markdown flourishes, edits and quotes, so every pipeline
//! stage has something to chew on. Same seed, same corpus, always.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{parse_tree, CommentRecord, CorpusConfig, DiscussionTree, TreeRecord};

/// Seed of the bundled 50-tree fixture.
pub const FIXTURE_SEED: u64 = 0x5EED_50;

const TOPIC_POOLS: &[&[&str]] = &[
    &["tax", "income", "revenue", "budget", "spending", "policy", "wealth", "economy", "market", "labor"],
    &["school", "teacher", "student", "exam", "grading", "college", "tuition", "learning", "classroom", "degree"],
    &["climate", "carbon", "energy", "solar", "emission", "warming", "fossil", "grid", "nuclear", "wind"],
    &["privacy", "data", "surveillance", "encryption", "platform", "tracking", "consent", "profile", "advertiser", "regulation"],
    &["diet", "protein", "health", "exercise", "nutrition", "calorie", "habit", "sleep", "fitness", "medicine"],
];

const FILLER: &[&str] = &[
    "argument", "evidence", "reason", "point", "view", "claim", "example", "case", "study", "number",
    "people", "society", "system", "problem", "effect", "cause", "result", "change", "question", "answer",
    "think", "believe", "consider", "suggest", "show", "mean", "matter", "happen", "work", "fail",
    "because", "however", "therefore", "clearly", "perhaps", "actually", "simply", "often", "never", "always",
    "the", "a", "an", "of", "to", "in", "that", "it", "is", "and",
];

fn pick<'a, T: Copy>(rng: &mut ChaCha8Rng, pool: &'a [T]) -> T {
    pool[rng.gen_range(0..pool.len())]
}

/// A body of roughly `n_words` words mixing the tree topic with filler,
/// with sentences, occasional quotes, links, Markdown and edit notes.
fn body(rng: &mut ChaCha8Rng, topic: &[&str], n_words: usize) -> String {
    let mut words: Vec<String> = Vec::with_capacity(n_words + 8);
    let mut since_period = 0usize;
    for _ in 0..n_words {
        let w = if rng.gen_range(0..10) < 4 {
            pick(rng, topic)
        } else {
            pick(rng, FILLER)
        };
        let styled = match rng.gen_range(0..40) {
            0 => format!("*{w}*"),
            1 => format!("**{w}**"),
            _ => w.to_string(),
        };
        words.push(styled);
        since_period += 1;
        if since_period >= rng.gen_range(8..14) {
            let last = words.last_mut().unwrap();
            last.push('.');
            since_period = 0;
        }
    }
    let mut text = words.join(" ");
    if !text.ends_with('.') {
        text.push('.');
    }
    if rng.gen_range(0..8) == 0 {
        text = format!("> you said {} was fine\n\n{text}", pick(rng, topic));
    }
    if rng.gen_range(0..8) == 0 {
        text.push_str(&format!(
            "\n\nsee https://example.com/{}.pdf for numbers",
            pick(rng, topic)
        ));
    }
    if rng.gen_range(0..10) == 0 {
        text.push_str("\n\nEDIT: fixed a typo\nstill the same point though");
    }
    text
}

/// Generate `n_trees` records. Deterministic in `seed`; independent of
/// platform and call order.
pub fn generate_corpus(n_trees: usize, seed: u64) -> Vec<TreeRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_trees).map(|i| generate_tree(i, &mut rng)).collect()
}

fn generate_tree(index: usize, rng: &mut ChaCha8Rng) -> TreeRecord {
    let tree_id = format!("t{index:03}");
    let op = format!("op{:02}", rng.gen_range(0..12));
    let topic = TOPIC_POOLS[rng.gen_range(0..TOPIC_POOLS.len())];
    let created = 1_420_000_000 + index as i64 * 400_000;
    let mut comments: Vec<CommentRecord> = Vec::new();
    let mut t = created;
    let mut next_id = 0usize;
    let fresh = |t: &mut i64, next_id: &mut usize| {
        *t += 60 + (*next_id as i64 % 7) * 30;
        *next_id += 1;
        (format!("{tree_id}c{:03}", *next_id - 1), *t)
    };

    let n_challengers = 9 + rng.gen_range(0..6);
    let mut winner: Option<(String, String)> = None; // (author, node id to award)
    let plant_delta = rng.gen_range(0..100) < 45;
    for j in 0..n_challengers {
        let author = format!("user{:02}", rng.gen_range(0..30));
        let n_words = if rng.gen_range(0..8) == 0 {
            20 + rng.gen_range(0..20)
        } else {
            55 + rng.gen_range(0..40)
        };
        let (root_id, _) = fresh(&mut t, &mut next_id);
        comments.push(CommentRecord {
            id: root_id.clone(),
            author: author.clone(),
            body: body(rng, topic, n_words),
            created_utc: t,
            parent_id: tree_id.clone(),
        });
        let mut last_challenger_node = root_id.clone();
        // some subtrees get a back-and-forth with the OP
        if rng.gen_range(0..10) < 6 {
            let (op_id, _) = fresh(&mut t, &mut next_id);
            comments.push(CommentRecord {
                id: op_id.clone(),
                author: op.clone(),
                body: {
                    let n = 20 + rng.gen_range(0..25);
                    body(rng, topic, n)
                },
                created_utc: t,
                parent_id: root_id.clone(),
            });
            if rng.gen_range(0..10) < 7 {
                let (reply_id, _) = fresh(&mut t, &mut next_id);
                comments.push(CommentRecord {
                    id: reply_id.clone(),
                    author: author.clone(),
                    body: {
                        let n = 30 + rng.gen_range(0..40);
                        body(rng, topic, n)
                    },
                    created_utc: t,
                    parent_id: op_id,
                });
                last_challenger_node = reply_id;
            }
        }
        // occasional third-party interjection → multi-challenger subtree
        if rng.gen_range(0..10) < 2 {
            let other = format!("user{:02}", rng.gen_range(0..30));
            let (other_id, _) = fresh(&mut t, &mut next_id);
            comments.push(CommentRecord {
                id: other_id,
                author: other,
                body: {
                    let n = 15 + rng.gen_range(0..25);
                    body(rng, topic, n)
                },
                created_utc: t,
                parent_id: root_id.clone(),
            });
        }
        if plant_delta && winner.is_none() && j >= n_challengers / 3 && n_words >= 55 {
            winner = Some((author, last_challenger_node));
        }
    }
    if let Some((_, node)) = &winner {
        let (award_id, _) = fresh(&mut t, &mut next_id);
        comments.push(CommentRecord {
            id: award_id.clone(),
            author: op.clone(),
            body: format!("∆ this {} argument changed my view.", pick(rng, topic)),
            created_utc: t,
            parent_id: node.clone(),
        });
        let (bot_id, _) = fresh(&mut t, &mut next_id);
        comments.push(CommentRecord {
            id: bot_id,
            author: "DeltaBot".to_string(),
            body: "Confirmed: 1 delta awarded.".to_string(),
            created_utc: t,
            parent_id: award_id,
        });
    }
    // a late OP wrap-up so candidate root replies precede the OP's last comment
    let (late_id, _) = fresh(&mut t, &mut next_id);
    comments.push(CommentRecord {
        id: late_id,
        author: op.clone(),
        body: {
            let n = 15 + rng.gen_range(0..15);
            body(rng, topic, n)
        },
        created_utc: t,
        parent_id: tree_id.clone(),
    });
    TreeRecord {
        id: tree_id.clone(),
        title: format!("CMV: {} {} is overrated", topic[0], topic[1]),
        author: op,
        body: {
            let n = 120 + rng.gen_range(0..120);
            body(rng, topic, n)
        },
        created_utc: created,
        comments,
    }
}

/// Parsed form of `generate_corpus`, using the default parsing config.
pub fn generate_trees(n_trees: usize, seed: u64) -> Vec<DiscussionTree> {
    let config = CorpusConfig::default();
    generate_corpus(n_trees, seed)
        .iter()
        .map(|r| parse_tree(r, &config).expect("synthetic record parses"))
        .collect()
}
