//! Seeded template corpora for exercising the classifiers without the
//! original annotated posts.
//!
//! Incident posts are slot-filled operator templates (street, stop, line);
//! sentiment comments draw from three disjoint word lists.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::{IncidentLabel, LabeledDoc, SentimentLabel};

/// Street names in the locative/genitive form used after "na ul." / "przy ul.".
pub const STREETS: &[&str] = &[
    "Legnickiej", "Grabiszyńskiej", "Kazimierza Wielkiego", "Powstańców Śląskich",
    "Świdnickiej", "Piłsudskiego", "Krakowskiej", "Curie-Skłodowskiej", "Traugutta",
    "Jedności Narodowej", "Żmigrodzkiej", "Kromera", "Borowskiej", "Ślężnej", "Hallera",
    "Kochanowskiego", "Osobowickiej", "Pomorskiej", "Nowowiejskiej", "Strzegomskiej",
];

pub const STOPS: &[&str] = &[
    "Plac Grunwaldzki", "Dworzec Główny", "Galeria Dominikańska", "Rynek", "Renoma",
    "Pl. Jana Pawła II", "Most Grunwaldzki", "Arkady", "Hala Stulecia", "Leśnica",
];

pub const TRAM_LINES: &[&str] = &["2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "15", "17", "20", "23", "31", "33"];
pub const BUS_LINES: &[&str] = &["106", "113", "114", "125", "126", "145", "146", "149", "253", "A", "D", "K", "N"];

fn templates(label: IncidentLabel) -> &'static [&'static str] {
    match label {
        IncidentLabel::Accident => &[
            "Wypadek na ul. {street}. Tramwaje linii {line} kursują objazdem.",
            "Kolizja samochodu z tramwajem na ul. {street}. Utrudnienia dla linii {line} i {line2}.",
            "Zderzenie pojazdów przy ul. {street}, autobusy {line} jadą objazdem.",
            "Potrącenie pieszego na ul. {street}. Ruch tramwajów linii {line} wstrzymany.",
            "Kolizja dwóch aut na przystanku {stop}, tramwaje {line} stoją.",
        ],
        IncidentLabel::Event => &[
            "W związku z meczem na stadionie linie {line} i {line2} kursują według zmienionego rozkładu.",
            "Maraton: w niedzielę ul. {street} będzie zamknięta, tramwaje {line} pojadą objazdem.",
            "Koncert w Hali Stulecia, dodatkowe kursy linii {line} z przystanku {stop}.",
            "Świąteczny rozkład jazdy obowiązuje na liniach {line} i {line2}.",
            "Przemarsz kibiców ul. {street}, chwilowe zmiany tras linii {line}.",
        ],
        IncidentLabel::Fix => &[
            "Usunięto awarię na ul. {street}. Tramwaje linii {line} wracają na stałe trasy.",
            "Przywrócono ruch na ul. {street}, linie {line} i {line2} kursują już normalnie.",
            "Koniec utrudnień przy ul. {street}. Autobusy {line} wróciły na swoje trasy.",
            "Ruch przywrócony na przystanku {stop}, linia {line} kursuje zgodnie z rozkładem.",
        ],
        IncidentLabel::Incident => &[
            "Interwencja policji na ul. {street}, tramwaje linii {line} stoją.",
            "Akcja straży pożarnej przy ul. {street}. Linie {line} i {line2} kierujemy objazdem.",
            "Interwencja pogotowia w tramwaju linii {line} na przystanku {stop}.",
            "Agresywny pasażer w autobusie {line}, interwencja służb na ul. {street}.",
            "Pożar pojazdu przy ul. {street}, działania straży, tramwaje {line} objazdem.",
        ],
        IncidentLabel::Malfunction => &[
            "Awaria zwrotnicy na ul. {street}. Tramwaje linii {line} kursują objazdem.",
            "Awaria sieci trakcyjnej przy ul. {street}, linie {line} i {line2} zatrzymane.",
            "Wykolejenie tramwaju linii {line} na ul. {street}.",
            "Uszkodzony pantograf w tramwaju linii {line} na przystanku {stop}, zablokowany przejazd.",
            "Brak zasilania na ul. {street}, tramwaje {line} stoją.",
            "Awaria tramwaju linii {line} przy ul. {street}, utrudnienia.",
        ],
        IncidentLabel::Renovation => &[
            "Od poniedziałku remont torowiska na ul. {street}. Tramwaje linii {line} pojadą objazdem.",
            "Planowe prace remontowe przy ul. {street}, zmiany w kursowaniu linii {line}.",
            "Przebudowa ul. {street}, od soboty autobusy {line} zmieniają trasę.",
            "Remont przystanku {stop} potrwa dwa tygodnie, linie {line} i {line2} bez zatrzymania.",
        ],
        IncidentLabel::Unknown => &[
            "Utrudnienia w ruchu na ul. {street}. Tramwaje linii {line} mogą mieć opóźnienia.",
            "Zatrzymanie ruchu na ul. {street}, linie {line} kursują objazdem.",
            "Uwaga, utrudnienia przy ul. {street}, opóźnienia linii {line} i {line2}.",
            "Nieprzejezdna ul. {street}, tramwaje {line} stoją w zatorze.",
        ],
    }
}

fn line(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.random_bool(0.75) {
        TRAM_LINES.choose(rng).expect("non-empty")
    } else {
        BUS_LINES.choose(rng).expect("non-empty")
    }
}

fn fill(template: &str, rng: &mut ChaCha8Rng) -> String {
    let first = line(rng);
    let mut second = line(rng);
    while second == first {
        second = line(rng);
    }
    template
        .replace("{street}", STREETS.choose(rng).expect("non-empty"))
        .replace("{stop}", STOPS.choose(rng).expect("non-empty"))
        .replace("{line2}", second)
        .replace("{line}", first)
}

/// One incident post text of the given type.
pub fn incident_text(label: IncidentLabel, rng: &mut ChaCha8Rng) -> String {
    let template = templates(label).choose(rng).expect("non-empty");
    fill(template, rng)
}

/// `per_class` documents for each of the seven incident types, interleaved
/// in a seeded random order.
pub fn incident_corpus(per_class: usize, seed: u64) -> Vec<LabeledDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs: Vec<LabeledDoc> = IncidentLabel::ALL
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, per_class))
        .map(|l| LabeledDoc::new(incident_text(l, &mut rng), l.as_str()))
        .collect();
    docs.shuffle(&mut rng);
    docs
}

fn sentiment_words(label: SentimentLabel) -> &'static [&'static str] {
    match label {
        SentimentLabel::Positive => &[
            "dziękuję", "super", "świetnie", "brawo", "sprawnie", "szybko", "dobra", "robota",
            "miło", "wielkie", "uznanie", "pięknie", "gratulacje", "doceniam",
        ],
        SentimentLabel::Neutral => &[
            "jaki", "będzie", "objazd", "którędy", "jedzie", "informacja", "kiedy", "przystanek",
            "rozkład", "godzina", "pytanie", "trasa", "wiadomo", "czy",
        ],
        SentimentLabel::Negative => &[
            "skandal", "znowu", "porażka", "tragedia", "wstyd", "beznadzieja", "żenada", "ciągle",
            "spóźniony", "fatalnie", "dramat", "koszmar", "okropnie", "dość",
        ],
    }
}

/// Comments of 4 to 8 words drawn from class-specific vocabularies.
pub fn sentiment_corpus(per_class: usize, seed: u64) -> Vec<LabeledDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(per_class * 3);
    for label in SentimentLabel::ALL {
        let words = sentiment_words(label);
        for _ in 0..per_class {
            let n = rng.random_range(4..=8);
            let text: Vec<&str> = (0..n).map(|_| *words.choose(&mut rng).expect("non-empty")).collect();
            docs.push(LabeledDoc::new(text.join(" "), label.as_str()));
        }
    }
    docs.shuffle(&mut rng);
    docs
}

/// Seeded shuffle, then the first `train_fraction` of documents for training.
pub fn train_test_split(mut docs: Vec<LabeledDoc>, train_fraction: f64, seed: u64) -> (Vec<LabeledDoc>, Vec<LabeledDoc>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    docs.shuffle(&mut rng);
    let cut = ((docs.len() as f64) * train_fraction).round() as usize;
    let test = docs.split_off(cut.min(docs.len()));
    (docs, test)
}
