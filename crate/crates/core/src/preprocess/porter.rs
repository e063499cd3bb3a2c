//! Porter stemmer, original 1980 rules.
//!
//! Operates on ASCII lowercase words. Bytes outside a-z are treated as
//! consonants, so tokens carrying digits or '@' pass through mostly
//! untouched. Words of length <= 2 are returned unchanged.

fn is_vowel(word: &[u8], i: usize) -> bool {
    match word[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => true,
        b'y' => i > 0 && !is_vowel(word, i - 1),
        _ => false,
    }
}

/// The measure m of word[..len]: [C](VC)^m[V].
fn measure(word: &[u8], len: usize) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..len {
        let v = is_vowel(word, i);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

fn contains_vowel(word: &[u8], len: usize) -> bool {
    (0..len).any(|i| is_vowel(word, i))
}

fn ends_double_consonant(word: &[u8]) -> bool {
    let n = word.len();
    n >= 2 && word[n - 1] == word[n - 2] && !is_vowel(word, n - 1)
}

/// *o: stem ends cvc where the final c is not w, x or y.
fn ends_cvc(word: &[u8], len: usize) -> bool {
    if len < 3 {
        return false;
    }
    let c = word[len - 1];
    !is_vowel(word, len - 1)
        && is_vowel(word, len - 2)
        && !is_vowel(word, len - 3)
        && c != b'w'
        && c != b'x'
        && c != b'y'
}

fn ends_with(word: &[u8], suffix: &[u8]) -> bool {
    word.len() >= suffix.len() && &word[word.len() - suffix.len()..] == suffix
}

/// Replace `suffix` with `replacement` if the remaining stem has measure > threshold.
fn replace_if_measure(word: &mut Vec<u8>, suffix: &[u8], replacement: &[u8], min_m: usize) -> bool {
    if ends_with(word, suffix) {
        let stem_len = word.len() - suffix.len();
        if measure(word, stem_len) > min_m {
            word.truncate(stem_len);
            word.extend_from_slice(replacement);
        }
        // Suffix matched: the step's rule list stops here either way.
        return true;
    }
    false
}

fn step_1a(word: &mut Vec<u8>) {
    if ends_with(word, b"sses") {
        word.truncate(word.len() - 2);
    } else if ends_with(word, b"ies") {
        word.truncate(word.len() - 2);
    } else if ends_with(word, b"ss") {
        // unchanged
    } else if ends_with(word, b"s") {
        word.truncate(word.len() - 1);
    }
}

fn step_1b(word: &mut Vec<u8>) {
    if ends_with(word, b"eed") {
        if measure(word, word.len() - 3) > 0 {
            word.truncate(word.len() - 1);
        }
        return;
    }
    let stripped = if ends_with(word, b"ed") && contains_vowel(word, word.len() - 2) {
        word.truncate(word.len() - 2);
        true
    } else if ends_with(word, b"ing") && contains_vowel(word, word.len() - 3) {
        word.truncate(word.len() - 3);
        true
    } else {
        false
    };
    if !stripped {
        return;
    }
    if ends_with(word, b"at") || ends_with(word, b"bl") || ends_with(word, b"iz") {
        word.push(b'e');
    } else if ends_double_consonant(word) {
        let last = word[word.len() - 1];
        if last != b'l' && last != b's' && last != b'z' {
            word.truncate(word.len() - 1);
        }
    } else if measure(word, word.len()) == 1 && ends_cvc(word, word.len()) {
        word.push(b'e');
    }
}

fn step_1c(word: &mut Vec<u8>) {
    if ends_with(word, b"y") && contains_vowel(word, word.len() - 1) {
        let n = word.len();
        word[n - 1] = b'i';
    }
}

const STEP_2_RULES: &[(&[u8], &[u8])] = &[
    (b"ational", b"ate"),
    (b"tional", b"tion"),
    (b"enci", b"ence"),
    (b"anci", b"ance"),
    (b"izer", b"ize"),
    (b"abli", b"able"),
    (b"alli", b"al"),
    (b"entli", b"ent"),
    (b"eli", b"e"),
    (b"ousli", b"ous"),
    (b"ization", b"ize"),
    (b"ation", b"ate"),
    (b"ator", b"ate"),
    (b"alism", b"al"),
    (b"iveness", b"ive"),
    (b"fulness", b"ful"),
    (b"ousness", b"ous"),
    (b"aliti", b"al"),
    (b"iviti", b"ive"),
    (b"biliti", b"ble"),
];

const STEP_3_RULES: &[(&[u8], &[u8])] = &[
    (b"icate", b"ic"),
    (b"ative", b""),
    (b"alize", b"al"),
    (b"iciti", b"ic"),
    (b"ical", b"ic"),
    (b"ful", b""),
    (b"ness", b""),
];

fn step_4(word: &mut Vec<u8>) {
    const SUFFIXES: &[&[u8]] = &[
        b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
        b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
    ];
    for suffix in SUFFIXES {
        if ends_with(word, suffix) {
            let stem_len = word.len() - suffix.len();
            if measure(word, stem_len) > 1 {
                // "ion" only drops after s or t.
                if *suffix == b"ion" {
                    let prev = word[stem_len.wrapping_sub(1)];
                    if stem_len == 0 || (prev != b's' && prev != b't') {
                        return;
                    }
                }
                word.truncate(stem_len);
            }
            return;
        }
    }
}

fn step_5a(word: &mut Vec<u8>) {
    if ends_with(word, b"e") {
        let stem_len = word.len() - 1;
        let m = measure(word, stem_len);
        if m > 1 || (m == 1 && !ends_cvc(word, stem_len)) {
            word.truncate(stem_len);
        }
    }
}

fn step_5b(word: &mut Vec<u8>) {
    if ends_double_consonant(word) && word[word.len() - 1] == b'l' && measure(word, word.len()) > 1
    {
        word.truncate(word.len() - 1);
    }
}

pub fn stem(token: &str) -> String {
    if token.len() <= 2 || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    let mut word = token.as_bytes().to_vec();
    step_1a(&mut word);
    step_1b(&mut word);
    step_1c(&mut word);
    for (suffix, replacement) in STEP_2_RULES {
        if replace_if_measure(&mut word, suffix, replacement, 0) {
            break;
        }
    }
    for (suffix, replacement) in STEP_3_RULES {
        if replace_if_measure(&mut word, suffix, replacement, 0) {
            break;
        }
    }
    step_4(&mut word);
    step_5a(&mut word);
    step_5b(&mut word);
    String::from_utf8(word).expect("ascii in, ascii out")
}
