// SPDX-License-Identifier: Apache-2.0
// frameguard-agent: native agent runner.
#include "frameguard/agents.hpp"
#include "frameguard/errors.hpp"
#include "frameguard/net.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fg = frameguard;

int main(int argc, char** argv)
{
    CLI::App app{"frameguard-agent: built-in Sandbox / FixedLoad client"};
    fg::agents::ClientOptions o;
    o.port = fg::net::default_port();
    std::string mode = "sandbox";
    std::int64_t guard_us = o.spin_guard.count();
    bool quiet = false;
    app.add_option("--host", o.host, "server host");
    app.add_option("--port", o.port, "server port");
    app.add_option("--mode", mode, "sandbox or fixedload")->check(CLI::IsMember({"sandbox", "fixedload"}));
    app.add_option("--processing-us", o.spec.processing_us, "emulated compute per frame");
    app.add_option("--extra-transport-us", o.spec.extra_transport_us, "emulated extra transport per frame");
    app.add_option("--delay-us", o.spec.injected_delay_us, "injected delay per frame");
    app.add_option("--label", o.spec.label, "name sent in HELLO");
    app.add_option("--spin-guard-us", guard_us, "busy-wait window before each deadline");
    app.add_flag("-q,--quiet", quiet, "no summary line");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        o.mode = fg::agents::parse_mode(mode);
        o.spec.validate();
        o.spin_guard = std::chrono::microseconds(guard_us);
        const auto report = fg::agents::run_client(o);
        if (!quiet)
            std::cerr << "agent " << (o.spec.label.empty() ? mode : o.spec.label) << ": rounds=" << report.rounds
                      << " frames=" << report.frames_received << " actions=" << report.actions_sent
                      << " dropped=" << report.frames_dropped << '\n';
        return 0;
    } catch (const fg::HandshakeError& e) {
        std::cerr << "agent: handshake failed: " << e.what() << '\n';
        return 2;
    } catch (const fg::ConnectionError& e) {
        std::cerr << "agent: " << e.what() << '\n';
        return 5;
    } catch (const fg::ProtocolError& e) {
        std::cerr << "agent: " << e.what() << '\n';
        return 5;
    } catch (const fg::Error& e) {
        std::cerr << "agent: " << e.what() << '\n';
        return 1;
    }
}
