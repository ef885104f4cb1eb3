#include "text_tables.hpp"

#include "winoreg/text.hpp"

namespace winoreg::tables {

const WordSet& verbs() {
    static const WordSet set = {
        "accept", "accuse", "admire", "admit", "advocate", "affect", "agree",
        "allow", "announce", "annoy", "answer", "apologize", "appoint",
        "approach", "argue", "arrange", "arrest", "arrive", "ask", "attack",
        "avoid", "award", "ban", "bear", "beat", "become", "begin", "believe",
        "belong", "bite", "blame", "block", "blow", "borrow", "bother",
        "bounce", "break", "bring", "build", "bully", "burn", "buy",
        "calculate", "call", "cancel", "capture", "care", "carry", "catch",
        "cause", "celebrate", "charge", "chase", "cheat", "check", "chew",
        "choose", "claim", "clean", "climb", "close", "collect", "comfort",
        "command", "compare", "complain", "confess", "confuse", "connect",
        "console", "contain", "continue", "convince", "cook", "count",
        "cover", "crash", "crawl", "create", "criticize", "cross", "cry",
        "cure", "cut", "dance", "decide", "declare", "defeat", "defend",
        "delay", "deliver", "demand", "deny", "depend", "describe", "deserve",
        "design", "destroy", "disagree", "disappoint", "discover", "discuss",
        "dislike", "dive", "divide", "doubt", "drag", "draw", "dream",
        "dress", "drink", "drive", "drop", "earn", "eat", "elect", "embarrass",
        "employ", "empty", "encourage", "end", "endure", "enjoy", "enter",
        "envy", "escape", "estimate", "examine", "exclude", "exit", "expect",
        "explain", "explore", "fail", "fall", "fear", "feed", "feel", "fight",
        "fill", "find", "finish", "fire", "fit", "fix", "flee", "float",
        "fly", "fold", "follow", "forbid", "force", "forget", "forgive",
        "free", "frighten", "frown", "gather", "get", "give", "glare", "go",
        "grab", "greet", "grow", "guess", "guide", "hand", "hang", "harvest",
        "hate", "heal", "hear", "help", "hide", "hire", "hit", "hold",
        "honor", "hope", "hunt", "hurry", "hurt", "ignore", "impress",
        "improve", "include", "increase", "influence", "injure", "insist",
        "insult", "intend", "invent", "invite", "involve", "join", "judge",
        "jump", "keep", "kick", "kill", "kneel", "knock", "know", "land",
        "laugh", "lead", "lean", "learn", "leave", "lend", "let", "lie",
        "lift", "like", "listen", "live", "load", "lock", "look", "lose",
        "love", "lower", "make", "manage", "matter", "mean", "measure",
        "meet", "mention", "mind", "miss", "mix", "mock", "mourn", "move",
        "need", "nod", "nominate", "notice", "obey", "observe", "offer",
        "open", "operate", "oppose", "order", "organize", "own", "pack",
        "paint", "panic", "pass", "pause", "pay", "permit", "persuade",
        "pick", "plan", "plant", "play", "please", "point", "possess",
        "postpone", "pour", "practice", "praise", "prefer", "prepare",
        "prevent", "produce", "promise", "propose", "protect", "prove",
        "provide", "pull", "punish", "push", "put", "question", "quit",
        "race", "raise", "reach", "read", "receive", "recognize", "recommend",
        "reduce", "refer", "refuse", "regret", "reject", "relate", "relax",
        "release", "rely", "remain", "remember", "remind", "remove", "repair",
        "replace", "reply", "report", "request", "require", "rescue",
        "resign", "resist", "respect", "respond", "rest", "retire", "return",
        "reveal", "reward", "ride", "ring", "rise", "rob", "roll", "rub",
        "run", "rush", "sail", "satisfy", "save", "say", "scare", "schedule",
        "scold", "search", "see", "seek", "seem", "sell", "send", "sentence",
        "separate", "serve", "shake", "share", "shift", "shoot", "shout",
        "show", "sing", "sink", "sit", "sleep", "slide", "slip", "smell",
        "smile", "speak", "spend", "spin", "stand", "stare", "start", "state",
        "stay", "steal", "stick", "stop", "strike", "study", "succeed",
        "suffer", "suggest", "supply", "support", "surrender", "suspect",
        "swallow", "swear", "swim", "take", "talk", "taste", "teach", "tease",
        "tell", "test", "thank", "think", "threaten", "throw", "tolerate",
        "toss", "touch", "train", "trap", "travel", "treat", "trust", "try",
        "turn", "twist", "understand", "unlock", "upset", "use", "visit",
        "vote", "wait", "wake", "walk", "want", "warn", "wash", "waste",
        "watch", "water", "wave", "wear", "weep", "welcome", "whisper", "win",
        "wish", "wonder", "work", "worry", "wrap", "write", "yell", "yield",
    };
    return set;
}

const WordSet& adjectives() {
    static const WordSet set = {
        "able", "afraid", "aggressive", "alive", "amazed", "ancient", "angry",
        "anxious", "ashamed", "asleep", "available", "awake", "aware", "bad",
        "beautiful", "big", "bitter", "blunt", "bored", "boring", "brave",
        "bright", "broken", "busy", "calm", "careful", "careless", "certain",
        "cheap", "clean", "clear", "clever", "closed", "cloudy", "cold",
        "comfortable", "common", "complete", "confident", "confused",
        "cooked", "cool", "correct", "cowardly", "crooked", "crowded",
        "cruel", "curious", "dangerous", "dark", "dead", "deep", "defensive",
        "delighted", "different", "difficult", "dirty", "dishonest",
        "disappointed", "dry", "dull", "eager", "early", "easy", "empty",
        "envious", "equal", "exact", "excited", "exciting", "expensive",
        "fair", "fake", "famous", "fast", "fat", "final", "fine", "first",
        "flat", "foolish", "fragile", "free", "fresh", "friendly", "full",
        "funny", "furious", "generous", "gentle", "glad", "good", "grateful",
        "greedy", "green", "guilty", "handsome", "happy", "hard", "harmful",
        "harmless", "healthy", "heavy", "helpful", "helpless", "high",
        "hollow", "honest", "hopeful", "hopeless", "hostile", "hot", "huge",
        "humble", "hungry", "ill", "illegal", "important", "impossible",
        "incorrect", "innocent", "intelligent", "interesting", "jealous",
        "kind", "large", "last", "late", "lazy", "legal", "light", "likely",
        "little", "lonely", "long", "loose", "loud", "low", "loyal", "lucky",
        "mad", "main", "mean", "minor", "modern", "narrow", "nervous", "new",
        "next", "nice", "noisy", "normal", "obvious", "odd", "old", "open",
        "ordinary", "painful", "pale", "patient", "peaceful", "perfect",
        "pleasant", "pleased", "polite", "poor", "popular", "possible",
        "powerful", "pretty", "private", "proud", "public", "quick", "quiet",
        "rare", "raw", "ready", "real", "recent", "red", "rich", "right",
        "ripe", "rotten", "rough", "round", "rude", "sad", "safe",
        "satisfied", "scared", "selfish", "serious", "shallow", "sharp",
        "short", "shy", "sick", "silent", "silly", "similar", "simple",
        "skinny", "slow", "small", "smart", "smooth", "soft", "solid",
        "sore", "sorry", "sour", "special", "steep", "sticky", "stiff",
        "straight", "strange", "strict", "strong", "stupid", "successful",
        "sudden", "surprised", "sweet", "tall", "terrible", "terrified",
        "thankful", "thick", "thin", "thirsty", "tight", "tidy", "tiny",
        "tired", "tough", "true", "ugly", "uncertain", "uncomfortable",
        "unfair", "unhappy", "unlikely", "unlucky", "unusual", "upset",
        "useful", "useless", "usual", "vacant", "vague", "valuable",
        "violent", "visible", "warm", "weak", "wealthy", "weird", "wet",
        "whole", "wide", "wild", "wise", "wonderful", "worried", "worthless",
        "wrong", "young",
    };
    return set;
}

const WordSet& adverbs() {
    static const WordSet set = {
        "again",  "almost", "already", "also",    "always",    "anywhere",
        "apart",  "away",   "back",    "badly",   "carefully", "easily",
        "even",   "eventually", "finally", "forward", "hardly", "here",
        "instead", "just",  "maybe",   "nearly",  "now",       "often",
        "only",   "perhaps", "quickly", "quite",  "rarely",    "rather",
        "really", "recently", "slowly", "sometimes", "soon",   "still",
        "suddenly", "then", "there",   "today",   "together",  "tomorrow",
        "too",    "usually", "very",   "well",    "yesterday",
    };
    return set;
}

const WordSet& pronouns() {
    static const WordSet set = {
        "anybody",   "anyone",   "anything",  "everybody", "everyone",
        "everything", "he",      "her",       "herself",   "him",
        "himself",   "i",        "it",        "itself",    "me",
        "mine",      "myself",   "one",       "ours",      "ourselves",
        "she",       "somebody", "someone",   "something", "that",
        "theirs",    "them",     "themselves", "these",    "they",
        "this",      "those",    "us",        "we",        "what",
        "which",     "who",      "whom",      "whose",     "you",
        "yours",     "yourself", "yourselves",
    };
    return set;
}

const WordSet& determiners() {
    static const WordSet set = {
        "a",     "all",   "an",     "another", "any",   "both",  "each",
        "either", "every", "few",   "her",     "his",   "its",   "many",
        "more",  "most",  "much",   "my",      "neither", "no",  "other",
        "our",   "several", "some", "such",    "that",  "the",   "their",
        "these", "this",  "those",  "whatever", "which", "your",
    };
    return set;
}

const WordSet& be_forms() {
    static const WordSet set = {"am", "are", "be", "been", "being", "is", "was", "were"};
    return set;
}

const WordSet& have_do_forms() {
    static const WordSet set = {"did", "do", "does", "had", "has", "have"};
    return set;
}

const WordSet& modals() {
    static const WordSet set = {"can",   "could", "may",    "might", "must",
                                "ought", "shall", "should", "will",  "would"};
    return set;
}

const WordSet& prepositions() {
    static const WordSet set = {
        "about",  "above",   "across", "against", "along",   "among",
        "around", "at",      "behind", "below",   "beneath", "beside",
        "between", "beyond", "by",     "down",    "during",  "for",
        "from",   "in",      "inside", "into",    "near",    "of",
        "off",    "on",      "onto",   "out",     "outside", "over",
        "past",   "through", "to",     "toward",  "towards", "under",
        "up",     "upon",    "via",    "with",    "within",  "without",
    };
    return set;
}

const WordSet& subordinators() {
    static const WordSet set = {
        "after",  "although", "because", "before", "if",       "once",
        "since",  "though",   "unless",  "until",  "when",     "whenever",
        "whereas", "wherever", "while",
    };
    return set;
}

const WordSet& coordinators() {
    static const WordSet set = {"and", "but", "nor", "or", "so", "yet"};
    return set;
}

const WordSet& negations() {
    static const WordSet set = {"n't", "never", "no", "not"};
    return set;
}

const WordSet& wh_words() {
    static const WordSet set = {"what", "which", "who", "whom", "whose"};
    return set;
}

const WordSet& stop_words() {
    static const WordSet set = {
        "a",        "about",   "above",    "after",    "again",   "against",
        "all",      "although", "am",      "an",       "and",     "any",
        "are",      "as",      "at",       "be",       "because", "been",
        "before",   "being",   "below",    "between",  "both",    "but",
        "by",       "can",     "could",    "did",      "do",      "does",
        "doing",    "down",    "during",   "each",     "few",     "for",
        "from",     "further", "had",      "has",      "have",    "having",
        "he",       "her",     "here",     "hers",     "herself", "him",
        "himself",  "his",     "how",      "i",        "if",      "in",
        "into",     "is",      "it",       "its",      "itself",  "just",
        "may",      "me",      "might",    "more",     "most",    "must",
        "my",       "myself",  "no",       "nor",      "not",     "now",
        "n't",      "of",      "off",      "on",       "once",    "only",
        "or",       "other",   "ought",    "our",      "ours",    "ourselves",
        "out",      "over",    "own",      "same",     "shall",   "she",
        "should",   "since",   "so",       "some",     "such",    "than",
        "that",     "the",     "their",    "theirs",   "them",    "themselves",
        "then",     "there",   "these",    "they",     "this",    "those",
        "though",   "through", "to",       "too",      "under",   "unless",
        "until",    "up",      "very",     "was",      "we",      "were",
        "what",     "when",    "where",    "whereas",  "which",   "while",
        "who",      "whom",    "why",      "will",     "with",    "would",
        "yet",      "you",     "your",     "yours",    "yourself",
        "yourselves",
    };
    return set;
}

const WordMap& irregular_verb_lemmas() {
    static const WordMap map = {
        {"am", "be"},         {"are", "be"},       {"ate", "eat"},
        {"beat", "beat"},     {"became", "become"}, {"been", "be"},
        {"began", "begin"},   {"begun", "begin"},  {"being", "be"},
        {"bit", "bite"},      {"bitten", "bite"},  {"blew", "blow"},
        {"blown", "blow"},    {"bore", "bear"},    {"born", "bear"},
        {"bought", "buy"},    {"broke", "break"},  {"broken", "break"},
        {"brought", "bring"}, {"built", "build"},  {"came", "come"},
        {"caught", "catch"},  {"chose", "choose"}, {"chosen", "choose"},
        {"cut", "cut"},       {"did", "do"},       {"done", "do"},
        {"drank", "drink"},   {"drawn", "draw"},   {"drew", "draw"},
        {"driven", "drive"},  {"drove", "drive"},  {"drunk", "drink"},
        {"eaten", "eat"},     {"fallen", "fall"},  {"fed", "feed"},
        {"fell", "fall"},     {"felt", "feel"},    {"fled", "flee"},
        {"flew", "fly"},      {"flown", "fly"},    {"forbade", "forbid"},
        {"forbidden", "forbid"}, {"forgave", "forgive"}, {"forgiven", "forgive"},
        {"forgot", "forget"}, {"forgotten", "forget"}, {"fought", "fight"},
        {"found", "find"},    {"gave", "give"},    {"given", "give"},
        {"gone", "go"},       {"got", "get"},      {"gotten", "get"},
        {"grew", "grow"},     {"grown", "grow"},   {"had", "have"},
        {"has", "have"},      {"heard", "hear"},   {"held", "hold"},
        {"hid", "hide"},      {"hidden", "hide"},  {"hit", "hit"},
        {"hung", "hang"},     {"hurt", "hurt"},    {"is", "be"},
        {"kept", "keep"},     {"knew", "know"},    {"known", "know"},
        {"laid", "lay"},      {"lay", "lie"},      {"led", "lead"},
        {"left", "leave"},    {"lent", "lend"},    {"let", "let"},
        {"lost", "lose"},     {"made", "make"},    {"meant", "mean"},
        {"met", "meet"},      {"paid", "pay"},     {"put", "put"},
        {"ran", "run"},       {"rang", "ring"},    {"read", "read"},
        {"ridden", "ride"},   {"risen", "rise"},   {"rode", "ride"},
        {"rose", "rise"},     {"rung", "ring"},    {"said", "say"},
        {"sang", "sing"},     {"sank", "sink"},    {"sat", "sit"},
        {"saw", "see"},       {"seen", "see"},     {"sent", "send"},
        {"shaken", "shake"},  {"shook", "shake"},  {"shot", "shoot"},
        {"shown", "show"},    {"slept", "sleep"},  {"slid", "slide"},
        {"sold", "sell"},     {"spent", "spend"},  {"spoke", "speak"},
        {"spoken", "speak"},  {"spun", "spin"},    {"stolen", "steal"},
        {"stole", "steal"},   {"stood", "stand"},  {"struck", "strike"},
        {"stuck", "stick"},   {"sung", "sing"},    {"sunk", "sink"},
        {"swam", "swim"},     {"swore", "swear"},  {"sworn", "swear"},
        {"swum", "swim"},     {"taken", "take"},   {"taught", "teach"},
        {"thought", "think"}, {"threw", "throw"},  {"thrown", "throw"},
        {"told", "tell"},     {"took", "take"},    {"tore", "tear"},
        {"torn", "tear"},     {"understood", "understand"}, {"was", "be"},
        {"went", "go"},       {"wept", "weep"},    {"were", "be"},
        {"woke", "wake"},     {"woken", "wake"},   {"won", "win"},
        {"wore", "wear"},     {"worn", "wear"},    {"wound", "wind"},
        {"written", "write"}, {"wrote", "write"},
    };
    return map;
}

const WordMap& irregular_noun_lemmas() {
    static const WordMap map = {
        {"children", "child"},   {"feet", "foot"},     {"geese", "goose"},
        {"knives", "knife"},     {"leaves", "leaf"},   {"lives", "life"},
        {"men", "man"},          {"mice", "mouse"},    {"oxen", "ox"},
        {"people", "person"},    {"shelves", "shelf"}, {"teeth", "tooth"},
        {"thieves", "thief"},    {"wives", "wife"},    {"wolves", "wolf"},
        {"women", "woman"},
    };
    return map;
}

} // namespace winoreg::tables

namespace winoreg::lex {

namespace {

bool ends_with(const std::string& w, const char* suffix) {
    std::string s(suffix);
    return w.size() >= s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0;
}

// Undo consonant doubling ("stopped" -> "stopp" -> "stop").
std::string undouble(const std::string& w) {
    if (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2])
        return w.substr(0, w.size() - 1);
    return w;
}

// Candidate base forms for an inflected verb, most specific first.
std::vector<std::string> verb_base_candidates(const std::string& w) {
    std::vector<std::string> out;
    auto add = [&](std::string s) {
        if (!s.empty())
            out.push_back(std::move(s));
    };
    if (ends_with(w, "ies") && w.size() > 3)
        add(w.substr(0, w.size() - 3) + "y");
    if (ends_with(w, "ied") && w.size() > 3)
        add(w.substr(0, w.size() - 3) + "y");
    if (ends_with(w, "ing") && w.size() > 4) {
        std::string stem = w.substr(0, w.size() - 3);
        add(stem);
        add(stem + "e");
        add(undouble(stem));
    }
    if (ends_with(w, "ed") && w.size() > 3) {
        std::string stem = w.substr(0, w.size() - 2);
        add(stem);
        add(undouble(stem));
    }
    if (ends_with(w, "d") && w.size() > 2)
        add(w.substr(0, w.size() - 1));
    if (ends_with(w, "es") && w.size() > 3)
        add(w.substr(0, w.size() - 2));
    if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2)
        add(w.substr(0, w.size() - 1));
    return out;
}

} // namespace

bool is_stop_word(const std::string& w) { return tables::stop_words().count(w) > 0; }

bool is_verb_to_be(const std::string& w) { return tables::be_forms().count(w) > 0; }

bool is_aux(const std::string& w) {
    return tables::be_forms().count(w) || tables::have_do_forms().count(w) ||
           tables::modals().count(w);
}

bool is_negation_marker(const std::string& w) { return tables::negations().count(w) > 0; }

bool is_definite_pronoun(const std::string& w) {
    static const tables::WordSet set = {"he", "her", "him", "it", "she", "them", "they"};
    return set.count(w) > 0;
}

bool is_wh_word(const std::string& w) { return tables::wh_words().count(w) > 0; }

bool is_subordinator(const std::string& w) {
    return tables::subordinators().count(w) > 0;
}

bool is_coordinator(const std::string& w) { return tables::coordinators().count(w) > 0; }

bool is_reversing_connective(const std::string& w) {
    static const tables::WordSet set = {"although", "but", "though", "whereas", "yet"};
    return set.count(w) > 0;
}

bool is_comparative_adj(const std::string& w) {
    if (!ends_with(w, "er") || w.size() < 4)
        return false;
    const auto& adj = tables::adjectives();
    std::string stem = w.substr(0, w.size() - 2);
    return adj.count(stem) || adj.count(stem + "e") || adj.count(undouble(stem)) ||
           (ends_with(stem, "i") && adj.count(stem.substr(0, stem.size() - 1) + "y"));
}

std::string verb_lemma(const std::string& w) {
    const auto& irregular = tables::irregular_verb_lemmas();
    if (auto it = irregular.find(w); it != irregular.end())
        return it->second;
    const auto& base = tables::verbs();
    if (base.count(w))
        return w;
    for (const auto& cand : verb_base_candidates(w))
        if (base.count(cand))
            return cand;
    // Unknown verb: generic suffix strip so inflections still conflate.
    if (ends_with(w, "ies") && w.size() > 3)
        return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "ied") && w.size() > 3)
        return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "ing") && w.size() > 4)
        return undouble(w.substr(0, w.size() - 3));
    if (ends_with(w, "ed") && w.size() > 3)
        return undouble(w.substr(0, w.size() - 2));
    if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2)
        return w.substr(0, w.size() - 1);
    return w;
}

std::string noun_lemma(const std::string& w) {
    const auto& irregular = tables::irregular_noun_lemmas();
    if (auto it = irregular.find(w); it != irregular.end())
        return it->second;
    if (ends_with(w, "men") && w.size() > 3)
        return w.substr(0, w.size() - 3) + "man";
    if (ends_with(w, "ies") && w.size() > 3)
        return w.substr(0, w.size() - 3) + "y";
    if ((ends_with(w, "ses") || ends_with(w, "xes") || ends_with(w, "zes") ||
         ends_with(w, "ches") || ends_with(w, "shes")) &&
        w.size() > 3)
        return w.substr(0, w.size() - 2);
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
        !ends_with(w, "is") && w.size() > 2)
        return w.substr(0, w.size() - 1);
    return w;
}

std::string adj_lemma(const std::string& w) {
    const auto& adj = tables::adjectives();
    if (adj.count(w))
        return w;
    auto strip = [&](std::size_t n) -> std::string {
        std::string stem = w.substr(0, w.size() - n);
        if (adj.count(stem))
            return stem;
        if (adj.count(stem + "e"))
            return stem + "e";
        if (adj.count(undouble(stem)))
            return undouble(stem);
        if (ends_with(stem, "i") && adj.count(stem.substr(0, stem.size() - 1) + "y"))
            return stem.substr(0, stem.size() - 1) + "y";
        return {};
    };
    if (ends_with(w, "est") && w.size() > 4)
        if (auto s = strip(3); !s.empty())
            return s;
    if (ends_with(w, "er") && w.size() > 3)
        if (auto s = strip(2); !s.empty())
            return s;
    return w;
}

} // namespace winoreg::lex
