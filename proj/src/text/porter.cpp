#include "affect/text/porter.hpp"

namespace affect::text {

namespace {

class Stemmer {
public:
    explicit Stemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

    bool cons(int i) const {
        switch (at(i)) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u': return false;
        case 'y': return i == 0 ? true : !cons(i - 1);
        default: return true;
        }
    }

    /// Number of VC sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const { return j >= 1 && at(j) == at(j - 1) && cons(j); }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = at(i);
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (b_.compare(static_cast<std::size_t>(k_ + 1 - len), s.size(), s) != 0) return false;
        j_ = k_ - len;
        return true;
    }

    void setto(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), b_.size() - static_cast<std::size_t>(j_ + 1), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void r(std::string_view s) {
        if (m() > 0) setto(s);
    }

    bool rule(std::string_view suffix, std::string_view replacement) {
        if (!ends(suffix)) return false;
        r(replacement);
        return true;
    }

    void step1ab() {
        if (at(k_) == 's') {
            if (ends("sses"))
                k_ -= 2;
            else if (ends("ies"))
                setto("i");
            else if (at(k_ - 1) != 's')
                --k_;
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at"))
                setto("ate");
            else if (ends("bl"))
                setto("ble");
            else if (ends("iz"))
                setto("ize");
            else if (doublec(k_)) {
                --k_;
                const char ch = at(k_);
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (j_ = k_; m() == 1 && cvc(k_))
                setto("e");
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1) return;
        switch (at(k_ - 1)) {
        case 'a':
            rule("ational", "ate") || rule("tional", "tion");
            break;
        case 'c':
            rule("enci", "ence") || rule("anci", "ance");
            break;
        case 'e':
            rule("izer", "ize");
            break;
        case 'l':
            rule("bli", "ble") || rule("alli", "al") || rule("entli", "ent") || rule("eli", "e") ||
                rule("ousli", "ous");
            break;
        case 'o':
            rule("ization", "ize") || rule("ation", "ate") || rule("ator", "ate");
            break;
        case 's':
            rule("alism", "al") || rule("iveness", "ive") || rule("fulness", "ful") || rule("ousness", "ous");
            break;
        case 't':
            rule("aliti", "al") || rule("iviti", "ive") || rule("biliti", "ble");
            break;
        case 'g':
            rule("logi", "log");
            break;
        default: break;
        }
    }

    void step3() {
        switch (at(k_)) {
        case 'e':
            rule("icate", "ic") || rule("ative", "") || rule("alize", "al");
            break;
        case 'i':
            rule("iciti", "ic");
            break;
        case 'l':
            rule("ical", "ic") || rule("ful", "");
            break;
        case 's':
            rule("ness", "");
            break;
        default: break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        switch (at(k_ - 1)) {
        case 'a':
            if (ends("al")) break;
            return;
        case 'c':
            if (ends("ance") || ends("ence")) break;
            return;
        case 'e':
            if (ends("er")) break;
            return;
        case 'i':
            if (ends("ic")) break;
            return;
        case 'l':
            if (ends("able") || ends("ible")) break;
            return;
        case 'n':
            if (ends("ant") || ends("ement") || ends("ment") || ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) break;
            if (ends("ou")) break;
            return;
        case 's':
            if (ends("ism")) break;
            return;
        case 't':
            if (ends("ate") || ends("iti")) break;
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
        default: return;
        }
        if (m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (at(k_) == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (at(k_) == 'l' && doublec(k_) && m() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

} // namespace

std::string porter_stem(std::string_view word) { return Stemmer(word).run(); }

} // namespace affect::text
