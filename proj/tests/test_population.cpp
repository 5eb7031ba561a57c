#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "capg/codec.hpp"
#include "capg/population.hpp"
#include "support/generators.hpp"
#include "support/util.hpp"

using namespace capg;
using namespace capg::population;

TEST_CASE("derive_vuln_class: CPE part mapping") {
    CHECK(derive_vuln_class("cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*") ==
          VulnClass::application);
    CHECK(derive_vuln_class("cpe:2.3:o:linux:linux_kernel:5.10:*:*:*:*:*:*:*") ==
          VulnClass::operating_system);
    CHECK(derive_vuln_class("cpe:2.3:h:vendor:device:-:*:*:*:*:*:*:*") == VulnClass::hardware);

    CHECK_THROWS_AS(derive_vuln_class("cpe:/a:apache:log4j"), CapgError);  // CPE 2.2 form
    CHECK_THROWS_AS(derive_vuln_class("cpe:2.3:a"), CapgError);
    try {
        derive_vuln_class("cpe:2.3:x:vendor:thing:1:*:*:*:*:*:*:*");
        FAIL("expected CapgError");
    } catch (const CapgError& e) {
        CHECK(e.code() == ErrorCode::unknown_part);
    }
}

namespace {

TrialTranscript transcript_fixture(const std::string& name) {
    return parse_transcript(testing::read_fixture("transcripts/" + name));
}

}  // namespace

TEST_CASE("derive_machines_constraints: first success on the ladder wins") {
    CHECK(derive_machines_constraints(transcript_fixture("cve-2021-44228.json")) ==
          std::vector<MachineConstraint>{MachineConstraint::unconstrained});
    CHECK(derive_machines_constraints(transcript_fixture("cve-2021-38648.json")) ==
          std::vector<MachineConstraint>{MachineConstraint::same});

    TrialTranscript t;
    t.machine_trials = {{MachineTrialContext::unrelated_machine, false},
                        {MachineTrialContext::same_windows_domain, true},
                        {MachineTrialContext::same_ldap, true}};
    CHECK(derive_machines_constraints(t) ==
          std::vector<MachineConstraint>{MachineConstraint::different,
                                         MachineConstraint::same_windows_domain});

    // flipping a later trial cannot change the value picked by an earlier success
    t.machine_trials[2].succeeded = false;
    CHECK(derive_machines_constraints(t) ==
          std::vector<MachineConstraint>{MachineConstraint::different,
                                         MachineConstraint::same_windows_domain});
}

TEST_CASE("derive_machines_constraints: failures") {
    TrialTranscript t;
    t.machine_trials = {{MachineTrialContext::unrelated_machine, false},
                        {MachineTrialContext::same_machine, false}};
    try {
        derive_machines_constraints(t);
        FAIL("expected CapgError");
    } catch (const CapgError& e) {
        CHECK(e.code() == ErrorCode::no_successful_trial);
    }

    t.machine_trials = {{MachineTrialContext::same_machine, false},
                        {MachineTrialContext::unrelated_machine, true}};
    try {
        derive_machines_constraints(t);
        FAIL("expected CapgError");
    } catch (const CapgError& e) {
        CHECK(e.code() == ErrorCode::out_of_order_trials);
    }

    CHECK_THROWS_AS(derive_machines_constraints(TrialTranscript{}), CapgError);
}

TEST_CASE("derive_user_source: ladder mapping") {
    TrialTranscript t;
    t.user_trials = {{UserTrialContext::unrelated_user, true}};
    CHECK(derive_user_source(t) == UserCharacteristic::any_user);

    CHECK(derive_user_source(transcript_fixture("cve-2021-38648.json")) ==
          UserCharacteristic::machine_local);
    CHECK(derive_user_source(transcript_fixture("cve-2022-36804.json")) ==
          UserCharacteristic::application);

    t.user_trials = {{UserTrialContext::unrelated_user, false},
                     {UserTrialContext::directory_user, true}};
    CHECK(derive_user_source(t) == UserCharacteristic::directory);

    t.user_trials = {{UserTrialContext::local_user, false},
                     {UserTrialContext::root_or_system, true}};
    CHECK(derive_user_source(t) == UserCharacteristic::system_or_root);

    // a later success never overrides an earlier one
    t.user_trials = {{UserTrialContext::directory_user, true},
                     {UserTrialContext::application_account, true}};
    CHECK(derive_user_source(t) == UserCharacteristic::directory);
}

TEST_CASE("derive_user_destination: whoami decision tree") {
    DestinationEvidence e;
    e.can_exec = true;
    e.whoami = "tomcat";
    CHECK(derive_user_destination(e) == UserCharacteristic::machine_local);

    e.whoami = "root";
    CHECK(derive_user_destination(e) == UserCharacteristic::system_or_root);
    e.whoami = "SYSTEM";
    CHECK(derive_user_destination(e) == UserCharacteristic::system_or_root);

    e.whoami = "alice";
    e.directory_users = std::vector<std::string>{"alice", "bob"};
    CHECK(derive_user_destination(e) == UserCharacteristic::directory);

    e.can_exec = false;
    e.whoami = "repo-bot";
    e.application_users = std::vector<std::string>{"repo-bot"};
    CHECK(derive_user_destination(e) == UserCharacteristic::application);

    e.application_users = std::vector<std::string>{"someone-else"};
    try {
        derive_user_destination(e);
        FAIL("expected CapgError");
    } catch (const CapgError& err) {
        CHECK(err.code() == ErrorCode::manual_investigation_required);
    }
}

TEST_CASE("derive_users_constraints") {
    CHECK(derive_users_constraints("u-tomcat", "root", std::nullopt) ==
          std::vector<UserConstraint>{UserConstraint::different});
    CHECK(derive_users_constraints("alice", "alice", std::nullopt) ==
          std::vector<UserConstraint>{UserConstraint::same});
    CHECK(derive_users_constraints("app-a", "app-b",
                                   std::vector<std::string>{"app-a", "app-b"}) ==
          std::vector<UserConstraint>{UserConstraint::different,
                                      UserConstraint::same_application});
    CHECK_THROWS_AS(derive_users_constraints("", "root", std::nullopt), CapgError);
}

TEST_CASE("assemble_record: the three documented examples regenerate field-for-field") {
    const auto bundled = parse_capg(testing::read_fixture("records.json")).records;

    const CapgRecord log4j = assemble_record(
        *CveId::parse("2021-44228"), "https://github.com/kozmer/log4j-shell-poc",
        "cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*", transcript_fixture("cve-2021-44228.json"));
    CHECK(log4j == bundled[0]);

    const CapgRecord omi = assemble_record(
        *CveId::parse("2021-38648"), "https://github.com/AlteredSecurity/CVE-2021-38648",
        "cpe:2.3:a:microsoft:open_management_infrastructure:1.6.8:*:*:*:*:*:*:*",
        transcript_fixture("cve-2021-38648.json"));
    CHECK(omi == bundled[1]);

    const CapgRecord bitbucket = assemble_record(
        *CveId::parse("2022-36804"),
        "https://github.com/rapid7/metasploit-framework/blob/master/modules/exploits/multi/http/"
        "bitbucket_env_var_rce.rb",
        "cpe:2.3:a:atlassian:bitbucket:7.0.0:*:*:*:*:*:*:*",
        transcript_fixture("cve-2022-36804.json"));
    CHECK(bitbucket == bundled[2]);
}

TEST_CASE("assemble_record: error paths") {
    const TrialTranscript t = transcript_fixture("cve-2021-44228.json");
    try {
        assemble_record(*CveId::parse("2021-44228"), "",
                        "cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*", t);
        FAIL("expected CapgError");
    } catch (const CapgError& e) {
        CHECK(e.code() == ErrorCode::no_exploit);
    }

    TrialTranscript no_evidence = t;
    no_evidence.destination_evidence.reset();
    CHECK_THROWS_AS(assemble_record(*CveId::parse("2021-44228"),
                                    "https://github.com/kozmer/log4j-shell-poc",
                                    "cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*", no_evidence),
                    CapgError);

    // an invalid exploit URL surfaces as a validation failure
    CHECK_THROWS_AS(assemble_record(*CveId::parse("2021-44228"), "not-a-url",
                                    "cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*", t),
                    CapgError);
}

TEST_CASE("assemble_record: fuzzed transcripts always give a valid record or an error") {
    testing::Rng rng(2468);
    int assembled = 0;
    for (int i = 0; i < 300; ++i) {
        TrialTranscript t;
        int rank = 0;
        for (MachineTrialContext context :
             {MachineTrialContext::unrelated_machine, MachineTrialContext::same_windows_domain,
              MachineTrialContext::same_ldap, MachineTrialContext::adjacent_network,
              MachineTrialContext::same_machine}) {
            if (rng.chance(0.6)) t.machine_trials.push_back({context, rng.chance(0.4)});
            ++rank;
        }
        for (UserTrialContext context :
             {UserTrialContext::unrelated_user, UserTrialContext::directory_user,
              UserTrialContext::local_user, UserTrialContext::root_or_system,
              UserTrialContext::application_account}) {
            if (rng.chance(0.6)) t.user_trials.push_back({context, rng.chance(0.4)});
        }
        if (rng.chance(0.9)) {
            DestinationEvidence e;
            e.can_exec = rng.chance(0.7);
            e.whoami = rng.pick(std::vector<std::string>{"root", "SYSTEM", "tomcat", "alice",
                                                         "repo-bot", ""});
            if (rng.chance(0.4)) {
                e.directory_users = std::vector<std::string>{"alice", "dir-user"};
            }
            if (rng.chance(0.4)) {
                e.application_users = std::vector<std::string>{"repo-bot", "app-user"};
            }
            t.destination_evidence = e;
        }
        if (rng.chance(0.5)) t.source_whoami = rng.pick(std::vector<std::string>{
            "tomcat", "alice", "root", "repo-bot"});

        try {
            const CapgRecord record =
                assemble_record(*CveId::parse("2021-44228"),
                                "https://github.com/kozmer/log4j-shell-poc",
                                "cpe:2.3:a:apache:log4j:2.0:-:*:*:*:*:*:*", t);
            for (const Issue& issue : validate(record)) {
                CHECK(issue.severity != Severity::error);
            }
            ++assembled;
        } catch (const CapgError&) {
            // a derivation error is the other legal outcome
        }
    }
    CHECK(assembled > 10);
}

TEST_CASE("parse_cvss: canonical vectors") {
    const CvssVector v = parse_cvss("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H");
    CHECK(v.version == "3.1");
    CHECK(v.av == CvssAv::local);
    CHECK(v.pr == CvssPr::low);
    CHECK(v.metrics.size() == 8);
    CHECK(v.raw == "CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H");
    CHECK_FALSE(v.base_score.has_value());

    // unknown metrics ride along verbatim
    const CvssVector w = parse_cvss("CVSS:3.0/AV:N/PR:N/XX:Q");
    CHECK(w.metrics.back() == std::pair<std::string, std::string>{"XX", "Q"});

    CHECK_THROWS_AS(parse_cvss("CVSS:2.0/AV:N/PR:N"), CapgError);
    CHECK_THROWS_AS(parse_cvss("AV:N/PR:N"), CapgError);
    CHECK_THROWS_AS(parse_cvss("CVSS:3.1/AV:N"), CapgError);        // PR missing
    CHECK_THROWS_AS(parse_cvss("CVSS:3.1/AV:Z/PR:N"), CapgError);   // bad AV
    CHECK_THROWS_AS(parse_cvss("CVSS:3.1/AV:N/AV:L/PR:N"), CapgError);  // duplicate
}

TEST_CASE("lint_against_cvss: the four advisory rules") {
    const auto records = parse_capg(testing::read_fixture("records.json")).records;
    const CapgRecord& log4j = records[0];
    const CapgRecord& omi = records[1];

    SUBCASE("consistent pairs stay silent") {
        CHECK(lint_against_cvss(omi, parse_cvss("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H"))
                  .empty());
        CHECK(lint_against_cvss(log4j,
                                parse_cvss("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H"))
                  .empty());
    }
    SUBCASE("AV:N against a same-machine-only record") {
        const auto warnings =
            lint_against_cvss(omi, parse_cvss("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H"));
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].severity == Severity::warning);
        CHECK(warnings[0].field == "machines_constraints");
    }
    SUBCASE("AV:L against a record without `same`") {
        const auto warnings =
            lint_against_cvss(log4j, parse_cvss("CVSS:3.1/AV:L/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"));
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].field == "machines_constraints");
    }
    SUBCASE("PR:N against a privileged source") {
        const auto warnings =
            lint_against_cvss(omi, parse_cvss("CVSS:3.1/AV:L/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"));
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].field == "user_source");
    }
    SUBCASE("PR:L against any-user") {
        const auto warnings =
            lint_against_cvss(log4j, parse_cvss("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H"));
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].field == "user_source");
    }
}

TEST_CASE("lint_against_cvss: random pairs agree with a literal rule evaluation") {
    testing::Rng rng(130013);
    const std::vector<std::string> av = {"N", "A", "L", "P"};
    const std::vector<std::string> pr = {"N", "L", "H"};
    for (int i = 0; i < 300; ++i) {
        const CapgRecord record = testing::random_record(rng);
        const std::string vector_text =
            "CVSS:3.1/AV:" + rng.pick(av) + "/AC:L/PR:" + rng.pick(pr) + "/UI:N/S:U/C:H/I:H/A:H";
        const CvssVector vector = parse_cvss(vector_text);
        const auto warnings = lint_against_cvss(record, vector);

        const bool has_same = std::find(record.machines_constraints.begin(),
                                        record.machines_constraints.end(),
                                        MachineConstraint::same) !=
                              record.machines_constraints.end();
        const bool any_user = record.user_source == UserCharacteristic::any_user;
        std::size_t expected = 0;
        if (vector.av == CvssAv::local && !has_same) ++expected;
        if (vector.av == CvssAv::network && has_same) ++expected;  // [same] is always alone
        if (vector.pr == CvssPr::none && !any_user) ++expected;
        if (vector.pr != CvssPr::none && any_user) ++expected;
        REQUIRE(warnings.size() == expected);
    }
}

TEST_CASE("load_nvd_record: bundled fixtures") {
    const NvdRecord log4j =
        load_nvd_record(testing::read_fixture("nvd/CVE-2021-44228.json"));
    CHECK(log4j.cve.str() == "2021-44228");
    REQUIRE_FALSE(log4j.cpes.empty());
    CHECK(log4j.cpes[0].rfind("cpe:2.3:a:", 0) == 0);
    REQUIRE(log4j.cvss.has_value());
    CHECK(log4j.cvss->av == CvssAv::network);
    CHECK(log4j.cvss->base_score == doctest::Approx(10.0));

    const NvdRecord omi = load_nvd_record(testing::read_fixture("nvd/CVE-2021-38648.json"));
    CHECK(omi.cvss->av == CvssAv::local);
    CHECK(omi.cvss->pr == CvssPr::low);
    CHECK(omi.cvss->base_score == doctest::Approx(7.8));
    CHECK(derive_vuln_class(omi.cpes[0]) == VulnClass::application);
}

TEST_CASE("load_nvd_record: tolerant of absent metrics, strict about shape") {
    const NvdRecord bare = load_nvd_record(R"({"cve": {"id": "CVE-2020-1472"}})");
    CHECK(bare.cve.str() == "2020-1472");
    CHECK(bare.cpes.empty());
    CHECK_FALSE(bare.cvss.has_value());

    CHECK_THROWS_AS(load_nvd_record("{{{"), CapgError);
    try {
        load_nvd_record(R"({"vulnerabilities": []})");
        FAIL("expected CapgError");
    } catch (const CapgError& e) {
        CHECK(e.code() == ErrorCode::schema_mismatch);
    }
}

TEST_CASE("transcript parsing is strict") {
    CHECK_THROWS_AS(parse_transcript("[]"), CapgError);
    CHECK_THROWS_AS(parse_transcript(R"({"machine_trials": [{"context": "warp", "succeeded": true}]})"),
                    CapgError);
    CHECK_THROWS_AS(parse_transcript(R"({"machine_trials": [
        {"context": "same-machine", "succeeded": true},
        {"context": "same-machine", "succeeded": false}]})"),
                    CapgError);
    CHECK_THROWS_AS(parse_transcript(R"({"unexpected": 1})"), CapgError);
}
