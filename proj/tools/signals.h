#pragma once

#include <csignal>
#include <pthread.h>

// Blocks SIGINT and SIGTERM in every thread started afterwards; call first in main.
inline sigset_t block_stop_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

inline void wait_for_stop(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}
