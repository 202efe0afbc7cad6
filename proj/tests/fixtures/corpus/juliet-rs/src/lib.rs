use std::collections::HashMap;

/// Counts how often each word appears in a piece of text.
pub struct WordCounter {
    counts: HashMap<String, usize>,
}

impl WordCounter {
    /// Creates an empty counter with no words recorded yet.
    pub fn new() -> Self {
        WordCounter { counts: HashMap::new() }
    }

    /// Splits the text on whitespace and records every word it finds.
    pub fn add_text(&mut self, text: &str) {
        for word in text.split_whitespace() {
            // lower case so that counts ignore capitalisation
            *self.counts.entry(word.to_lowercase()).or_insert(0) += 1;
        }
    }

    pub fn get(&self, word: &str) -> usize {
        *self.counts.get(word).unwrap_or(&0)
    }
}

/// Returns the number of distinct words in the given text.
pub fn distinct_words(text: &str) -> usize {
    let mut c = WordCounter::new();
    c.add_text(text);
    c.counts.len()
}
