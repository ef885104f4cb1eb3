#include "winoreg/stemmer.hpp"

#include <cstring>

namespace winoreg {

namespace {

// Classic Porter algorithm over a mutable buffer b[0..k].
struct Stem {
    std::string b;
    int k = 0; // offset of the last valid character
    int j = 0; // suffix boundary maintained by ends()

    bool cons(int i) const {
        switch (b[static_cast<std::size_t>(i)]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !cons(i - 1);
        default:
            return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i)
            if (!cons(i))
                return true;
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1) return false;
        if (b[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i - 1)])
            return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, final consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2))
            return false;
        char ch = b[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        int length = static_cast<int>(std::strlen(s));
        if (length > k + 1)
            return false;
        if (b.compare(static_cast<std::size_t>(k - length + 1),
                      static_cast<std::size_t>(length), s) != 0)
            return false;
        j = k - length;
        return true;
    }

    void set_to(const char* s) {
        int length = static_cast<int>(std::strlen(s));
        b.replace(static_cast<std::size_t>(j + 1), b.size(), s);
        k = j + length;
    }

    void replace_if_stem(const char* s) {
        if (m() > 0)
            set_to(s);
    }

    // Plurals and -ed / -ing.
    void step1ab() {
        if (b[static_cast<std::size_t>(k)] == 's') {
            if (ends("sses"))
                k -= 2;
            else if (ends("ies"))
                set_to("i");
            else if (b[static_cast<std::size_t>(k - 1)] != 's')
                --k;
        }
        if (ends("eed")) {
            if (m() > 0)
                --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (double_cons(k)) {
                --k;
                char ch = b[static_cast<std::size_t>(k)];
                if (ch == 'l' || ch == 's' || ch == 'z')
                    ++k;
            } else if (m() == 1 && cvc(k)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem())
            b[static_cast<std::size_t>(k)] = 'i';
    }

    void step2() {
        switch (b[static_cast<std::size_t>(k - 1)]) {
        case 'a':
            if (ends("ational")) { replace_if_stem("ate"); break; }
            if (ends("tional")) { replace_if_stem("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { replace_if_stem("ence"); break; }
            if (ends("anci")) { replace_if_stem("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { replace_if_stem("ize"); break; }
            break;
        case 'l':
            if (ends("bli")) { replace_if_stem("ble"); break; }
            if (ends("alli")) { replace_if_stem("al"); break; }
            if (ends("entli")) { replace_if_stem("ent"); break; }
            if (ends("eli")) { replace_if_stem("e"); break; }
            if (ends("ousli")) { replace_if_stem("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { replace_if_stem("ize"); break; }
            if (ends("ation")) { replace_if_stem("ate"); break; }
            if (ends("ator")) { replace_if_stem("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { replace_if_stem("al"); break; }
            if (ends("iveness")) { replace_if_stem("ive"); break; }
            if (ends("fulness")) { replace_if_stem("ful"); break; }
            if (ends("ousness")) { replace_if_stem("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { replace_if_stem("al"); break; }
            if (ends("iviti")) { replace_if_stem("ive"); break; }
            if (ends("biliti")) { replace_if_stem("ble"); break; }
            break;
        case 'g':
            if (ends("logi")) { replace_if_stem("log"); break; }
            break;
        default:
            break;
        }
    }

    void step3() {
        switch (b[static_cast<std::size_t>(k)]) {
        case 'e':
            if (ends("icate")) { replace_if_stem("ic"); break; }
            if (ends("ative")) { replace_if_stem(""); break; }
            if (ends("alize")) { replace_if_stem("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { replace_if_stem("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { replace_if_stem("ic"); break; }
            if (ends("ful")) { replace_if_stem(""); break; }
            break;
        case 's':
            if (ends("ness")) { replace_if_stem(""); break; }
            break;
        default:
            break;
        }
    }

    void step4() {
        switch (b[static_cast<std::size_t>(k - 1)]) {
        case 'a':
            if (ends("al")) break;
            return;
        case 'c':
            if (ends("ance")) break;
            if (ends("ence")) break;
            return;
        case 'e':
            if (ends("er")) break;
            return;
        case 'i':
            if (ends("ic")) break;
            return;
        case 'l':
            if (ends("able")) break;
            if (ends("ible")) break;
            return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j >= 0 &&
                (b[static_cast<std::size_t>(j)] == 's' ||
                 b[static_cast<std::size_t>(j)] == 't'))
                break;
            if (ends("ou")) break;
            return;
        case 's':
            if (ends("ism")) break;
            return;
        case 't':
            if (ends("ate")) break;
            if (ends("iti")) break;
            return;
        case 'u':
            if (ends("ous")) break;
            return;
        case 'v':
            if (ends("ive")) break;
            return;
        case 'z':
            if (ends("ize")) break;
            return;
        default:
            return;
        }
        if (m() > 1)
            k = j;
    }

    void step5() {
        j = k;
        if (b[static_cast<std::size_t>(k)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1)))
                --k;
        }
        if (b[static_cast<std::size_t>(k)] == 'l' && double_cons(k) && m() > 1)
            --k;
    }
};

} // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() < 3)
        return word;
    Stem s;
    s.b = word;
    s.k = static_cast<int>(word.size()) - 1;
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.resize(static_cast<std::size_t>(s.k + 1));
    return s.b;
}

} // namespace winoreg
