"""統合テストモジュール"""