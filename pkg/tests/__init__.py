"""モビング行動シミュレータのテストパッケージ"""